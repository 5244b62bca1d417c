use super::builders::cos_turns;
use crate::parallel::map_indexed;
use crate::rng::{self, domain};
use crate::stats::{mean_half_width, CompensatedSum};
use rand::Rng;
use serde::Serialize;

/// |cos| at or below this is treated as an exact zero.
pub const ZERO_COS: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct LthetaSeries {
    pub k_trunc: usize,
    /// Σ_{k=0}^{K} 2^{−k−2} log|cos 2πkθ|, or −∞.
    pub value: f64,
    pub neg_infinite: bool,
    pub first_zero_k: Option<usize>,
    /// Value of the next 64 terms after K.
    pub tail: f64,
}

fn partial(theta: f64, from: usize, to: usize) -> (f64, Option<usize>) {
    let mut s = CompensatedSum::new();
    for k in from..=to {
        let c = cos_turns(k as f64 * theta).abs();
        if c <= ZERO_COS {
            return (f64::NEG_INFINITY, Some(k));
        }
        s.add(c.ln() * 0.5f64.powi(k as i32 + 2));
    }
    (s.value(), None)
}

/// Truncated series for the top exponent of the (diag(1,0), R_{2πθ}) pair.
pub fn ltheta_series(theta: f64, k_trunc: usize) -> LthetaSeries {
    let (value, first_zero_k) = partial(theta, 0, k_trunc);
    let tail = if first_zero_k.is_some() { 0.0 } else { partial(theta, k_trunc + 1, k_trunc + 64).0 };
    LthetaSeries { k_trunc, value, neg_infinite: first_zero_k.is_some(), first_zero_k, tail }
}

#[derive(Debug, Clone, Serialize)]
pub struct LthetaSimulation {
    pub estimate: f64,
    pub half_width: f64,
    pub neg_infinite: bool,
    pub n_steps: usize,
    pub n_trials: usize,
}

/// Monte Carlo of the reduced chain: the direction is e1 rotated k times
/// since the last projection; each projection adds log|cos 2πkθ|.
pub fn ltheta_simulate(theta: f64, n_steps: usize, n_trials: usize, seed: u64) -> LthetaSimulation {
    let rates: Vec<Option<f64>> = map_indexed(n_trials, |t| {
        let mut r = rng::stream(seed, domain::TRIALS, t as u64);
        let mut k = 0usize;
        let mut acc = CompensatedSum::new();
        for _ in 0..n_steps {
            if r.random::<bool>() {
                k += 1;
            } else {
                let c = cos_turns(k as f64 * theta).abs();
                if c <= ZERO_COS {
                    return None;
                }
                acc.add(c.ln());
                k = 0;
            }
        }
        Some(acc.value() / n_steps as f64)
    });
    if rates.iter().any(|r| r.is_none()) {
        return LthetaSimulation { estimate: f64::NEG_INFINITY, half_width: 0.0, neg_infinite: true, n_steps, n_trials };
    }
    let rates: Vec<f64> = rates.into_iter().flatten().collect();
    let (estimate, half_width) = mean_half_width(&rates);
    LthetaSimulation { estimate, half_width, neg_infinite: false, n_steps, n_trials }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_zero() {
        let s = ltheta_series(0.0, 40);
        assert_eq!(s.value, 0.0);
        assert_eq!(ltheta_simulate(0.0, 1000, 4, 1).estimate, 0.0);
    }

    #[test]
    fn quarter_turn_is_flagged() {
        let s = ltheta_series(0.25, 40);
        assert!(s.neg_infinite && s.first_zero_k == Some(1));
        assert!(ltheta_simulate(0.25, 1000, 4, 1).neg_infinite);
    }

    #[test]
    fn series_matches_simulation_at_one_tenth() {
        let s = ltheta_series(0.1, 60);
        let m = ltheta_simulate(0.1, 200_000, 8, 3);
        assert!((s.value - m.estimate).abs() < 3.0 * m.half_width + 2e-3, "{} vs {:?}", s.value, m);
    }
}
