use super::atomic::AtomicMatrixMeasure;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::transport::transport_cost;

fn sup_entry(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// (Wasserstein-1 distance, Hausdorff distance of supports), both for the
/// entrywise sup metric on matrices.
pub fn topology_distance(nu1: &AtomicMatrixMeasure, nu2: &AtomicMatrixMeasure) -> Result<(f64, f64)> {
    if nu1.dim() != nu2.dim() {
        return Err(Error::DimensionMismatch { expected: nu1.dim(), got: nu2.dim() });
    }
    let cost: Vec<Vec<f64>> = nu1
        .atoms()
        .iter()
        .map(|a| nu2.atoms().iter().map(|b| sup_entry(a, b)).collect())
        .collect();
    let w1 = transport_cost(nu1.weights(), nu2.weights(), &cost);
    let forward = cost.iter().map(|row| row.iter().cloned().fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let backward = (0..nu2.len())
        .map(|j| cost.iter().map(|row| row[j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok((w1, forward.max(backward)))
}
