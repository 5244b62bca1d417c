use super::{orthonormal_columns, Matrix, Vector};
use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

const RANK_TOL: f64 = 1e-13;

/// A line in ℝ^d, stored as a unit vector whose first nonzero coordinate
/// is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint {
    v: Vector,
}

impl ProjectivePoint {
    pub fn new(v: Vector) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument("projective point from a zero or non-finite vector".into()));
        }
        let mut u = v / n;
        if let Some(first) = u.iter().find(|x| **x != 0.0) {
            if *first < 0.0 {
                u.neg_mut();
            }
        }
        Ok(Self { v: u })
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::new(Vector::from_column_slice(v))
    }

    /// The standard basis direction e_i.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = Vector::zeros(d);
        v[i] = 1.0;
        Self { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn vector(&self) -> &Vector {
        &self.v
    }

    /// g·x.
    pub fn act(&self, g: &Matrix) -> Result<Self> {
        if g.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: g.ncols() });
        }
        Self::new(g * &self.v)
    }

    /// The line as a one-dimensional subspace.
    pub fn to_subspace(&self) -> SubspacePoint {
        SubspacePoint { frame: Matrix::from_column_slice(self.dim(), 1, self.v.as_slice()) }
    }
}

/// An r-dimensional subspace of ℝ^d stored as an orthonormal d×r frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePoint {
    frame: Matrix,
}

impl SubspacePoint {
    /// Span of the columns of `m`; fails if they are linearly dependent.
    pub fn from_columns(m: &Matrix) -> Result<Self> {
        let q = orthonormal_columns(m, RANK_TOL);
        if q.ncols() != m.ncols() || q.ncols() == 0 {
            return Err(Error::Degenerate(format!(
                "columns span dimension {} instead of {}",
                q.ncols(),
                m.ncols()
            )));
        }
        Ok(Self { frame: q })
    }

    /// Span of the columns of `m`, of whatever dimension they span.
    pub fn span_of(m: &Matrix) -> Result<Self> {
        let q = orthonormal_columns(m, RANK_TOL);
        if q.ncols() == 0 {
            return Err(Error::Degenerate("columns span the zero subspace".into()));
        }
        Ok(Self { frame: q })
    }

    pub fn from_vectors(vs: &[Vector]) -> Result<Self> {
        if vs.is_empty() {
            return Err(Error::InvalidArgument("no spanning vectors".into()));
        }
        Self::from_columns(&Matrix::from_columns(vs))
    }

    /// span(e_i : i ∈ idx).
    pub fn coordinate(d: usize, idx: &[usize]) -> Self {
        let mut f = Matrix::zeros(d, idx.len());
        for (j, &i) in idx.iter().enumerate() {
            f[(i, j)] = 1.0;
        }
        Self { frame: f }
    }

    /// Trust the caller that `frame` is orthonormal (checked in debug builds).
    pub(crate) fn from_orthonormal(frame: Matrix) -> Self {
        debug_assert!(
            (frame.transpose() * &frame - Matrix::identity(frame.ncols(), frame.ncols())).norm() < 1e-8
        );
        Self { frame }
    }

    pub fn dim_ambient(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim_sub(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> Matrix {
        &self.frame * self.frame.transpose()
    }

    /// Orthonormal frame of the orthogonal complement (empty if full).
    pub fn complement_frame(&self) -> Matrix {
        let d = self.dim_ambient();
        let mut m = Matrix::zeros(d, d + self.dim_sub());
        for j in 0..self.dim_sub() {
            m.set_column(j, &self.frame.column(j));
        }
        for i in 0..d {
            m[(i, self.dim_sub() + i)] = 1.0;
        }
        let q = orthonormal_columns(&m, 1e-8);
        q.columns(self.dim_sub(), q.ncols() - self.dim_sub()).into_owned()
    }

    /// g·U.
    pub fn act(&self, g: &Matrix) -> Result<Self> {
        if g.ncols() != self.dim_ambient() {
            return Err(Error::DimensionMismatch { expected: self.dim_ambient(), got: g.ncols() });
        }
        Self::from_columns(&(g * &self.frame))
    }

    /// U + V (possibly of dimension less than the sum of dimensions).
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if other.dim_ambient() != self.dim_ambient() {
            return Err(Error::DimensionMismatch { expected: self.dim_ambient(), got: other.dim_ambient() });
        }
        let m = Matrix::from_fn(self.dim_ambient(), self.dim_sub() + other.dim_sub(), |i, j| {
            if j < self.dim_sub() {
                self.frame[(i, j)]
            } else {
                other.frame[(i, j - self.dim_sub())]
            }
        });
        Self::span_of(&m)
    }

    /// Whether `v` lies in the subspace up to relative tolerance `tol`.
    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        let r = orthogonal_projection_raw(&self.frame, v);
        r.norm() <= tol * v.norm().max(f64::MIN_POSITIVE)
    }

    /// Equality as subspaces.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim_sub() == other.dim_sub() && subspace_distance(self, other).map(|d| d < tol).unwrap_or(false)
    }
}

fn orthogonal_projection_raw(frame: &Matrix, v: &Vector) -> Vector {
    let mut r = v.clone();
    for _ in 0..2 {
        let c = frame.transpose() * &r;
        r -= frame * c;
    }
    r
}

/// v − P_W v, the component of `v` orthogonal to W.
pub fn orthogonal_projection(w: &SubspacePoint, v: &Vector) -> Result<Vector> {
    if v.len() != w.dim_ambient() {
        return Err(Error::DimensionMismatch { expected: w.dim_ambient(), got: v.len() });
    }
    Ok(orthogonal_projection_raw(&w.frame, v))
}

/// |sin ∠(u, v)|.
pub fn projective_distance(u: &ProjectivePoint, v: &ProjectivePoint) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), got: v.dim() });
    }
    // |u ∧ v| avoids the cancellation in u − (u·v)v for nearby points.
    let d = u.dim();
    let mut s = CompensatedSum::new();
    for i in 0..d {
        for j in i + 1..d {
            let w = u.v[i] * v.v[j] - u.v[j] * v.v[i];
            s.add(w * w);
        }
    }
    Ok(s.value().sqrt().min(1.0))
}

/// sup over unit u ∈ U of the distance from u to V: the largest principal
/// sine, and 1 whenever dim U > dim V.
pub fn subspace_distance(u: &SubspacePoint, v: &SubspacePoint) -> Result<f64> {
    if u.dim_ambient() != v.dim_ambient() {
        return Err(Error::DimensionMismatch { expected: u.dim_ambient(), got: v.dim_ambient() });
    }
    if u.dim_sub() > v.dim_sub() {
        return Ok(1.0);
    }
    let mut r = u.frame.clone();
    for _ in 0..2 {
        let c = v.frame.transpose() * &r;
        r -= &v.frame * c;
    }
    Ok(super::op_norm(&r).min(1.0))
}
