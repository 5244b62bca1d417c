use super::kernel::{mass, FiniteMarkovKernel};
use crate::error::{Error, Result};
use crate::stats::CompensatedSum;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct MassBoundReport {
    /// min over A of Ψ − 𝓣Ψ.
    pub kappa_a: f64,
    /// max(0, max over B of 𝓣Ψ − Ψ).
    pub kappa_b: f64,
    /// κ_A > 0: the drift hypotheses hold with these constants.
    pub hypotheses_hold: bool,
    /// ∫𝓣Ψ dζ ≥ ∫Ψ dζ (up to round-off), as for 𝓣-invariant ζ.
    pub zeta_admissible: bool,
    pub zeta_b: f64,
    pub zeta_total: f64,
    /// κ_A/(κ_A + κ_B)·ζ(X), when the hypotheses hold.
    pub bound: Option<f64>,
    pub satisfied: Option<bool>,
}

/// Tightest drift constants of Ψ for 𝓣 relative to (A, X∖A), and the
/// resulting lower bound on ζ(X∖A).
pub fn margulis_mass_bound_check(t: &FiniteMarkovKernel, psi: &[f64], a: &[usize], zeta: &[f64]) -> Result<MassBoundReport> {
    let n = t.n_states();
    if psi.len() != n || zeta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: psi.len().min(zeta.len()) });
    }
    if psi.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument("Ψ must be finite and nonnegative".into()));
    }
    let mut in_a = vec![false; n];
    for &x in a {
        if x >= n {
            return Err(Error::InvalidArgument(format!("A contains index {x} outside 0..{n}")));
        }
        in_a[x] = true;
    }
    let tpsi = t.apply(psi);
    let kappa_a = (0..n).filter(|&x| in_a[x]).map(|x| psi[x] - tpsi[x]).fold(f64::INFINITY, f64::min);
    let kappa_b = (0..n).filter(|&x| !in_a[x]).map(|x| tpsi[x] - psi[x]).fold(0.0, f64::max);
    let hypotheses_hold = kappa_a.is_finite() && kappa_a > 0.0;
    let dot = |f: &[f64]| {
        let mut s = CompensatedSum::new();
        f.iter().zip(zeta).for_each(|(a, b)| s.add(a * b));
        s.value()
    };
    let (int_tpsi, int_psi) = (dot(&tpsi), dot(psi));
    let scale = psi.iter().cloned().fold(1.0, f64::max) * mass(zeta, 0..n);
    let zeta_admissible = int_tpsi >= int_psi - 1e-12 * scale;
    let zeta_b = mass(zeta, (0..n).filter(|&x| !in_a[x]));
    let zeta_total = mass(zeta, 0..n);
    let bound = hypotheses_hold.then(|| kappa_a / (kappa_a + kappa_b) * zeta_total);
    let satisfied = bound.filter(|_| zeta_admissible).map(|b| zeta_b >= b - 1e-12);
    if satisfied == Some(false) {
        return Err(Error::Hypothesis(format!("mass bound violated: ζ(B) = {zeta_b} < {}", bound.unwrap())));
    }
    Ok(MassBoundReport { kappa_a, kappa_b, hypotheses_hold, zeta_admissible, zeta_b, zeta_total, bound, satisfied })
}

/// Additive constants from a multiplicative drift 𝓣Φ ≤ cΦ + b with
/// threshold α: returns (κ_A, smallest admissible κ_B) = (−log(c + b/α), log(c + b)).
pub fn multiplicative_to_additive(c: f64, b: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&c) || b < 0.0 {
        return Err(Error::InvalidArgument(format!("need 0 ≤ c < 1 and b ≥ 0, got c = {c}, b = {b}")));
    }
    if alpha <= b / (1.0 - c) {
        return Err(Error::InvalidArgument(format!("need α > b/(1 − c) = {}, got {alpha}", b / (1.0 - c))));
    }
    Ok((-(c + b / alpha).ln(), (c + b).ln()))
}
