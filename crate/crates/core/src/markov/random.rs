//! Random finite chains for tests and experiments.

use super::kernel::FiniteMarkovKernel;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

fn normalize(row: &mut [f64]) {
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
}

fn finish(mut rows: Vec<Vec<f64>>) -> FiniteMarkovKernel {
    for row in rows.iter_mut() {
        normalize(row);
        // Push the residual round-off into the largest entry.
        let s: f64 = row.iter().sum();
        let k = (0..row.len()).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
        row[k] += 1.0 - s;
    }
    FiniteMarkovKernel::new(rows).expect("generated rows are stochastic")
}

/// Irreducible kernel on n states: each x → x+1 (mod n) has positive
/// mass, other entries vanish with probability `sparsity`.
pub fn random_kernel<R: Rng + ?Sized>(n: usize, sparsity: f64, rng: &mut R) -> FiniteMarkovKernel {
    let rows = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let e: f64 = Exp1.sample(rng);
                    if y == (x + 1) % n { 0.1 + e } else if rng.random::<f64>() < sparsity { 0.0 } else { e }
                })
                .collect()
        })
        .collect();
    finish(rows)
}

/// Chain with a drift function: states sorted by Ψ, the upper half A only
/// moves to states of strictly smaller Ψ, so κ_A > 0.
pub fn random_drift_chain<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (FiniteMarkovKernel, Vec<f64>, Vec<usize>) {
    assert!(n >= 2);
    let mut psi = Vec::with_capacity(n);
    let mut level = 0.0;
    for _ in 0..n {
        psi.push(level);
        level += 0.1 + rng.random::<f64>() * 3.0;
    }
    let cut = n / 2;
    let rows = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let e: f64 = Exp1.sample(rng);
                    if x >= cut { if y < x { e } else { 0.0 } } else { 0.05 + e }
                })
                .collect()
        })
        .collect();
    (finish(rows), psi, (cut..n).collect())
}
