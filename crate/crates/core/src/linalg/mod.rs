//! Small-dimension linear algebra on real matrices: projective points,
//! subspace frames, flags, exterior powers and derivative cocycles.

mod derivative;
mod flag;
mod points;
pub mod random;
mod wedge;

pub use derivative::{projective_derivative, vertical_derivative};
pub use flag::FlagPoint;
pub use points::{
    orthogonal_projection, projective_distance, subspace_distance, ProjectivePoint, SubspacePoint,
};
pub use wedge::{binomial, exterior_power, wedge_indices};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Default relative determinant threshold for invertibility.
pub const INVERTIBILITY_TOL: f64 = 1e-12;

/// Operator (spectral) norm.
pub fn op_norm(g: &Matrix) -> f64 {
    if g.nrows() == 0 || g.ncols() == 0 {
        return 0.0;
    }
    if g.ncols() == 1 {
        return g.norm();
    }
    g.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Singular values in non-increasing order.
pub fn singular_values(g: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = g.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Refuse non-square, non-finite or numerically singular matrices.
///
/// The test is `|det g| > tol * ‖g‖^d`.
pub fn check_invertible(g: &Matrix, tol: f64) -> Result<()> {
    if g.nrows() != g.ncols() {
        return Err(Error::DimensionMismatch { expected: g.nrows(), got: g.ncols() });
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let d = g.nrows() as i32;
    let scale = op_norm(g).powi(d);
    let det = g.determinant();
    let threshold = tol * scale;
    if !(det.abs() > threshold) {
        return Err(Error::Singular { det, threshold });
    }
    Ok(())
}

/// Build a matrix from row-major entries.
pub fn from_row_major(d: usize, entries: &[f64]) -> Result<Matrix> {
    if entries.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, got: entries.len() });
    }
    Ok(Matrix::from_row_slice(d, d, entries))
}

/// Row-major entries of a matrix.
pub fn to_row_major(g: &Matrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.nrows() * g.ncols());
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            out.push(g[(i, j)]);
        }
    }
    out
}

/// Orthonormalize the columns of `m` by modified Gram–Schmidt with one
/// re-orthogonalization pass, dropping columns whose residual falls below
/// `rank_tol` relative to their original length.
pub fn orthonormal_columns(m: &Matrix, rank_tol: f64) -> Matrix {
    let d = m.nrows();
    let mut cols: Vec<Vector> = Vec::new();
    for j in 0..m.ncols() {
        let orig = m.column(j).into_owned();
        let n0 = orig.norm();
        if n0 == 0.0 || !n0.is_finite() {
            continue;
        }
        let mut v = orig / n0;
        for _ in 0..2 {
            for q in &cols {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let n = v.norm();
        if n > rank_tol {
            cols.push(v / n);
        }
    }
    let mut out = Matrix::zeros(d, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(m: &Matrix) -> Matrix {
    let d = m.nrows();
    let norm = m.abs().row_sum().max();
    let mut s = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        s += 1;
    }
    let a = m * scale;
    let mut term = Matrix::identity(d, d);
    let mut sum = Matrix::identity(d, d);
    for k in 1..=18 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_input_is_refused() {
        let g = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(check_invertible(&g, INVERTIBILITY_TOL), Err(Error::Singular { .. })));
        assert!(check_invertible(&Matrix::identity(3, 3), INVERTIBILITY_TOL).is_ok());
    }

    #[test]
    fn gram_schmidt_drops_dependent_columns() {
        let m = Matrix::from_column_slice(3, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        let q = orthonormal_columns(&m, 1e-13);
        assert_eq!(q.ncols(), 2);
        let g = q.transpose() * &q;
        assert!((g - Matrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn exponential_of_rotation_generator() {
        let t = 0.7f64;
        let m = Matrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&m);
        let r = Matrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!((e - r).norm() < 1e-13);
    }
}
