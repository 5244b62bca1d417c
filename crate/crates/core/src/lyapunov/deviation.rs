use super::spectrum::{top_exponent, McConfig};
use crate::error::{Error, Result};
use crate::linalg::{random::unit_vector, Vector};
use crate::measures::MatrixLaw;
use crate::parallel::map_indexed;
use crate::rng::{self, domain};
use crate::stats::linear_fit;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

/// Azuma–Hoeffding bound 2 exp(−s²/(2nA²)) for martingales with increments
/// bounded by A.
pub fn azuma_bound(a: f64, n: usize, s: f64) -> f64 {
    2.0 * (-(s * s) / (2.0 * n as f64 * a * a)).exp()
}

/// P(|S_n| ≥ s) for a simple ±1 random walk, summed in log space.
pub fn binomial_tail_abs(n: usize, s: f64) -> f64 {
    let lnc = |k: usize| ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let mut total = 0.0;
    for k in 0..=n {
        let sk = (2 * k) as f64 - n as f64;
        if sk.abs() >= s - 1e-12 {
            total += (lnc(k) - ln2n).exp();
        }
    }
    total.min(1.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LargeDeviationReport {
    pub lambda_hat: f64,
    pub epsilon: f64,
    pub n_max: usize,
    pub rows: Vec<DeviationRow>,
    /// Fitted exponential rate c in fraction ≈ C e^{−cN}; `None` when fewer
    /// than two fractions are positive.
    pub rate: Option<f64>,
    pub r_squared: Option<f64>,
    pub n_trials: usize,
    pub seed: u64,
}

/// Fraction of trajectories whose running rate (1/n) log‖g_{n−1}…g_0 v‖
/// leaves (λ̂_1 − ε, λ̂_1 + ε) for some n ∈ [N, N_max], for each N.
///
/// Trajectories start from a random unit vector with no burn-in. λ̂_1 comes
/// from a separate long run on an independent seed.
pub fn large_deviation_probe<L: MatrixLaw>(
    nu: &L,
    epsilon: f64,
    n_list: &[usize],
    n_max: Option<usize>,
    n_trials: usize,
    seed: u64,
) -> Result<LargeDeviationReport> {
    if n_list.is_empty() || n_list.contains(&0) || !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("N list must be non-empty and positive, ε > 0".into()));
    }
    let lambda_hat = top_exponent(nu, &McConfig::new(20_000, 32, rng::derive_seed(seed, domain::AUX)))?.estimate;
    let profile = running_rates(nu, n_list, n_max, n_trials, seed)?;
    Ok(summarize(lambda_hat, epsilon, n_list, profile, n_trials, seed))
}

pub(crate) struct RateProfile {
    pub n_max: usize,
    /// Per trial, the running rates at n = 1..=n_max.
    pub rates: Vec<Vec<f64>>,
}

pub(crate) fn running_rates<L: MatrixLaw>(
    nu: &L,
    n_list: &[usize],
    n_max: Option<usize>,
    n_trials: usize,
    seed: u64,
) -> Result<RateProfile> {
    let largest = *n_list.iter().max().unwrap();
    let n_max = n_max.unwrap_or(2 * largest).max(largest);
    let d = nu.dim();
    let rates = map_indexed(n_trials, |t| {
        let mut r = rng::stream(seed, domain::TRIALS, t as u64);
        let mut v = unit_vector(d, &mut r);
        let mut w = Vector::zeros(d);
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let g = nu.draw(&mut r);
            w.gemv(1.0, &g, &v, 0.0);
            let norm = w.norm();
            acc += norm.ln();
            v.copy_from(&w);
            v /= norm;
            out.push(acc / n as f64);
        }
        out
    });
    Ok(RateProfile { n_max, rates })
}

pub(crate) fn summarize(
    lambda_hat: f64,
    epsilon: f64,
    n_list: &[usize],
    profile: RateProfile,
    n_trials: usize,
    seed: u64,
) -> LargeDeviationReport {
    let last_violation: Vec<usize> = profile
        .rates
        .iter()
        .map(|rs| {
            rs.iter()
                .enumerate()
                .rev()
                .find(|(_, x)| (*x - lambda_hat).abs() >= epsilon)
                .map(|(i, _)| i + 1)
                .unwrap_or(0)
        })
        .collect();
    let rows: Vec<DeviationRow> = n_list
        .iter()
        .map(|&n| DeviationRow {
            n,
            fraction: last_violation.iter().filter(|&&l| l >= n).count() as f64 / n_trials as f64,
        })
        .collect();
    let pos: Vec<&DeviationRow> = rows.iter().filter(|r| r.fraction > 0.0).collect();
    let (rate, r2) = if pos.len() >= 2 {
        let xs: Vec<f64> = pos.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = pos.iter().map(|r| r.fraction.ln()).collect();
        let (_, slope, r2) = linear_fit(&xs, &ys);
        (Some(-slope), Some(r2))
    } else {
        (None, None)
    };
    LargeDeviationReport {
        lambda_hat,
        epsilon,
        n_max: profile.n_max,
        rows,
        rate,
        r_squared: r2,
        n_trials,
        seed,
    }
}
