use super::spectrum::{full_spectrum_qr, qr_step, McConfig};
use crate::error::{Error, Result};
use crate::linalg::{random::unit_vector, Matrix, SubspacePoint, Vector};
use crate::measures::AtomicMatrixMeasure;
use crate::rng::{self, domain};
use crate::stats::CompensatedSum;
use serde::Serialize;

/// Growth of a random vector of V̂^i along the recorded word, compared with
/// the finite-time QR exponent of the same word over the same window.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthCheck {
    pub level: usize,
    pub expected: f64,
    pub observed: f64,
    pub window: (usize, usize),
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationEstimate {
    #[serde(skip)]
    pub spaces: Vec<SubspacePoint>,
    pub dims: Vec<usize>,
    pub exponents: Vec<f64>,
    pub growth_checks: Vec<GrowthCheck>,
}

const GROWTH_TOL: f64 = 0.05;

/// Finite-horizon Oseledets filtration V^1 ⊃ … ⊃ V^k along one word.
///
/// V̂^i is the span of the trailing right singular directions of the
/// product, obtained stably by QR propagation of the transposed word in
/// reverse order.
pub fn filtration_estimate(nu: &AtomicMatrixMeasure, word_seed: u64, n_steps: usize) -> Result<FiltrationEstimate> {
    let d = nu.dim();
    let spec_cfg = McConfig::new(n_steps.max(d), 16, rng::derive_seed(word_seed, domain::AUX));
    let spec = full_spectrum_qr(nu, &spec_cfg)?;
    for i in 1..d {
        let gap = spec.values[i - 1] - spec.values[i];
        let hw = spec.half_width[i - 1].max(spec.half_width[i]);
        if gap <= 3.0 * hw || gap <= 1e-6 {
            return Err(Error::SpectrumGap(format!(
                "λ_{} − λ_{} = {gap:.3e} is not resolved (half-width {hw:.3e})",
                i,
                i + 1
            )));
        }
    }
    let mut r = rng::stream(word_seed, domain::TRIALS, 0);
    let word: Vec<usize> = (0..n_steps).map(|_| nu.sample_index(&mut r)).collect();

    let transposed: Vec<Matrix> = nu.atoms().iter().map(|a| a.transpose()).collect();
    let mut q = Matrix::identity(d, d);
    let mut buf = Matrix::zeros(d, d);
    let mut logs = vec![CompensatedSum::new(); d];
    for &i in word.iter().rev() {
        qr_step(&mut q, &transposed[i], &mut buf, &mut logs, false)?;
    }
    // Simple spectrum: V^i has dimension d − i + 1, spanned by the last columns.
    let spaces: Vec<SubspacePoint> = (0..d)
        .map(|i| SubspacePoint::from_orthonormal(q.columns(i, d - i).into_owned()))
        .collect();

    let min_gap = (1..d).map(|i| spec.values[i - 1] - spec.values[i]).fold(f64::INFINITY, f64::min);
    let m = n_steps.min(((30.0 / min_gap).floor() as usize).max(9));
    let b = m / 3;
    let window = (m - b) as f64;

    // Finite-time QR exponents of the same word over [b, m).
    let mut qf = Matrix::identity(d, d);
    let mut wlogs = vec![CompensatedSum::new(); d];
    for (t, &i) in word.iter().take(m).enumerate() {
        qr_step(&mut qf, &nu.atoms()[i], &mut buf, &mut wlogs, t >= b)?;
    }
    let finite: Vec<f64> = wlogs.iter().map(|l| l.value() / window).collect();

    let mut vr = rng::stream(word_seed, domain::START, 0);
    let mut checks = Vec::with_capacity(d);
    for (level, space) in spaces.iter().enumerate() {
        let c = unit_vector(space.dim_sub(), &mut vr);
        let mut v: Vector = space.frame() * c;
        let mut w = Vector::zeros(d);
        let mut acc = CompensatedSum::new();
        for (t, &i) in word.iter().take(m).enumerate() {
            w.gemv(1.0, &nu.atoms()[i], &v, 0.0);
            let n = w.norm();
            if t >= b {
                acc.add(n.ln());
            }
            v.copy_from(&w);
            v /= n;
        }
        let observed = acc.value() / window;
        let expected = finite[level];
        checks.push(GrowthCheck {
            level: level + 1,
            expected,
            observed,
            window: (b, m),
            passed: (observed - expected).abs() <= GROWTH_TOL,
        });
    }
    Ok(FiltrationEstimate {
        dims: spaces.iter().map(|s| s.dim_sub()).collect(),
        spaces,
        exponents: spec.values.clone(),
        growth_checks: checks,
    })
}
