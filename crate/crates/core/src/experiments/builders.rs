use crate::error::Result;
use crate::linalg::Matrix;
use crate::measures::AtomicMatrixMeasure;

/// cos(2πx), exact at multiples of a quarter turn.
pub fn cos_turns(x: f64) -> f64 {
    match x.rem_euclid(1.0) {
        r if r == 0.0 => 1.0,
        r if r == 0.25 || r == 0.75 => 0.0,
        r if r == 0.5 => -1.0,
        r => (std::f64::consts::TAU * r).cos(),
    }
}

/// sin(2πx), exact at multiples of a quarter turn.
pub fn sin_turns(x: f64) -> f64 {
    match x.rem_euclid(1.0) {
        r if r == 0.0 || r == 0.5 => 0.0,
        r if r == 0.25 => 1.0,
        r if r == 0.75 => -1.0,
        r => (std::f64::consts::TAU * r).sin(),
    }
}

/// A_1 = diag(B, 1), A_2 = diag(R_θ B, 1) with B = diag(σ, 1/σ) and
/// R_θ = [[cos θ, sin θ], [−sin θ, cos θ]]; weights (p, 1 − p).
pub fn example32(sigma: f64, theta: f64, p: f64) -> Result<AtomicMatrixMeasure> {
    let (a1, a2) = example32_atoms(sigma, theta);
    AtomicMatrixMeasure::new(vec![(p, a1), (1.0 - p, a2)])
}

pub fn example32_atoms(sigma: f64, theta: f64) -> (Matrix, Matrix) {
    let (c, s) = (theta.cos(), theta.sin());
    let a1 = Matrix::from_row_slice(3, 3, &[sigma, 0.0, 0.0, 0.0, 1.0 / sigma, 0.0, 0.0, 0.0, 1.0]);
    let a2 = Matrix::from_row_slice(3, 3, &[c * sigma, s / sigma, 0.0, -s * sigma, c / sigma, 0.0, 0.0, 0.0, 1.0]);
    (a1, a2)
}

/// (1 − t)δ_{diag(2, 1/2)} + tδ_{swap}.
pub fn kifer(t: f64) -> Result<AtomicMatrixMeasure> {
    let d = Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
    if t == 0.0 {
        return AtomicMatrixMeasure::dirac(d);
    }
    let swap = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    AtomicMatrixMeasure::new(vec![(1.0 - t, d), (t, swap)])
}

/// A_1 = diag(1, 0) and A_2 the rotation by 2πθ.
pub fn ltheta_atoms(theta: f64) -> (Matrix, Matrix) {
    let (c, s) = (cos_turns(theta), sin_turns(theta));
    (Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]), Matrix::from_row_slice(2, 2, &[c, -s, s, c]))
}
