//! Random vectors, frames and orthogonal matrices.

use super::{orthonormal_columns, Matrix, Vector};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vector {
    Vector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Uniform point on the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vector {
    loop {
        let v = gaussian_vector(d, rng);
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

/// Haar-distributed orthogonal frame with `cols` columns.
pub fn haar_frame<R: Rng + ?Sized>(d: usize, cols: usize, rng: &mut R) -> Matrix {
    loop {
        let g = gaussian_matrix(d, cols, rng);
        let q = orthonormal_columns(&g, 1e-8);
        if q.ncols() == cols {
            return q;
        }
    }
}

/// Haar-distributed orthogonal matrix.
pub fn haar_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    haar_frame(d, d, rng)
}

/// Haar-random orthonormal `cols`-frame inside the span of the orthonormal
/// `frame`.
pub fn haar_frame_in<R: Rng + ?Sized>(frame: &Matrix, cols: usize, rng: &mut R) -> Matrix {
    frame * haar_frame(frame.ncols(), cols, rng)
}
