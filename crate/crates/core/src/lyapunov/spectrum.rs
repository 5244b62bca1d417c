use crate::error::{Error, Result};
use crate::linalg::{exterior_power, random::unit_vector, Matrix, Vector};
use crate::measures::{AtomicMatrixMeasure, MatrixLaw};
use crate::parallel::map_indexed;
use crate::rng::{self, domain};
use crate::stats::{mean_half_width, CompensatedSum};
use serde::{Deserialize, Serialize};

/// Monte Carlo budget. Each trial runs `burn_in` unrecorded steps and then
/// `n_steps` recorded ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub n_steps: usize,
    pub n_trials: usize,
    pub seed: u64,
    pub burn_in: usize,
}

impl McConfig {
    pub fn new(n_steps: usize, n_trials: usize, seed: u64) -> Self {
        Self { n_steps, n_trials, seed, burn_in: (n_steps / 10).clamp(1, 1000) }
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_steps == 0 || self.n_trials == 0 {
            return Err(Error::InvalidArgument("n_steps and n_trials must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Qr,
    Exterior,
    TopOnly,
    Exact,
}

/// Comparison of Σ λ̂_i with the mean log-determinant.
///
/// `exact` is Σ p_i log|det A_i|. `realized` is the average over trials of
/// the recorded log|det| of the drawn matrices, which Σ λ̂_i reproduces to
/// rounding; `identity_err` is the largest per-trial discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumCheck {
    pub estimate: f64,
    pub exact: f64,
    pub abs_err: f64,
    pub realized: f64,
    pub identity_err: f64,
    pub sampling_half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    pub method: Method,
    #[serde(rename = "lambda")]
    pub values: Vec<f64>,
    pub half_width: Vec<f64>,
    pub multiplicities: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_sums: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_sum_half_width: Option<Vec<f64>>,
    pub sum_check: SumCheck,
    pub seed: u64,
    pub n_steps: usize,
    pub n_trials: usize,
}

impl SpectrumEstimate {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Group consecutive exponents whose separation is within the combined
/// half-widths.
fn multiplicities(values: &[f64], hw: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut run = 1;
    for i in 1..values.len() {
        if values[i - 1] - values[i] <= hw[i - 1] + hw[i] + 1e-9 {
            run += 1;
        } else {
            out.push(run);
            run = 1;
        }
    }
    if !values.is_empty() {
        out.push(run);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopExponent {
    pub estimate: f64,
    pub half_width: f64,
}

/// λ_1 from renormalized vector propagation from a random start.
pub fn top_exponent<L: MatrixLaw>(nu: &L, cfg: &McConfig) -> Result<TopExponent> {
    cfg.validate()?;
    let d = nu.dim();
    let rates: Vec<Result<f64>> = map_indexed(cfg.n_trials, |t| {
        let mut r = rng::stream(cfg.seed, domain::TRIALS, t as u64);
        let mut v = unit_vector(d, &mut rng::stream(cfg.seed, domain::START, t as u64));
        let mut w = Vector::zeros(d);
        let mut acc = CompensatedSum::new();
        for step in 0..cfg.burn_in + cfg.n_steps {
            let g = nu.draw(&mut r);
            w.gemv(1.0, &g, &v, 0.0);
            let n = w.norm();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::Singular { det: 0.0, threshold: 0.0 });
            }
            if step >= cfg.burn_in {
                acc.add(n.ln());
            }
            v.copy_from(&w);
            v /= n;
        }
        Ok(acc.value() / cfg.n_steps as f64)
    });
    let rates: Vec<f64> = rates.into_iter().collect::<Result<_>>()?;
    let (estimate, half_width) = mean_half_width(&rates);
    Ok(TopExponent { estimate, half_width })
}

/// One step of frame propagation: `q ← orth(g q)`, accumulating log R_ii.
pub(crate) fn qr_step(q: &mut Matrix, g: &Matrix, buf: &mut Matrix, logs: &mut [CompensatedSum], record: bool) -> Result<()> {
    buf.gemm(1.0, g, q, 0.0);
    let k = buf.ncols();
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let c = buf.column(i).dot(&buf.column(j));
                let (qi, mut cj) = buf.columns_range_pair_mut(i, j);
                cj.axpy(-c, &qi, 1.0);
            }
        }
        let r = buf.column(j).norm();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Singular { det: 0.0, threshold: 0.0 });
        }
        if record {
            logs[j].add(r.ln());
        }
        buf.column_mut(j).unscale_mut(r);
    }
    std::mem::swap(q, buf);
    Ok(())
}

struct QrTrial {
    exps: Vec<f64>,
    logdet: f64,
    identity_err: f64,
}

fn qr_trial<L: MatrixLaw>(nu: &L, cfg: &McConfig, t: usize) -> Result<QrTrial> {
    let d = nu.dim();
    let mut r = rng::stream(cfg.seed, domain::TRIALS, t as u64);
    let mut q = Matrix::identity(d, d);
    let mut buf = Matrix::zeros(d, d);
    let mut logs = vec![CompensatedSum::new(); d];
    let mut logdet = CompensatedSum::new();
    for step in 0..cfg.burn_in + cfg.n_steps {
        let g = nu.draw(&mut r);
        let record = step >= cfg.burn_in;
        if record {
            logdet.add(g.determinant().abs().ln());
        }
        qr_step(&mut q, &g, &mut buf, &mut logs, record)?;
    }
    let total: f64 = {
        let mut s = CompensatedSum::new();
        for l in &logs {
            s.add(l.value());
        }
        s.value()
    };
    let n = cfg.n_steps as f64;
    let scale = logdet.value().abs().max(1.0);
    // Columns can arrive out of order when the frame is an exact signed
    // permutation and the small component has underflowed.
    let mut exps: Vec<f64> = logs.iter().map(|l| l.value() / n).collect();
    exps.sort_by(|a, b| b.total_cmp(a));
    Ok(QrTrial {
        exps,
        logdet: logdet.value() / n,
        identity_err: (total - logdet.value()).abs() / scale,
    })
}

fn sorted_with(values: Vec<f64>, hw: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    (idx.iter().map(|&i| values[i]).collect(), idx.iter().map(|&i| hw[i]).collect())
}

fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

/// Full spectrum by QR (Benettin) frame propagation.
///
/// `exact_log_det` is Σ p_i log|det A_i| when known (atomic measures).
pub fn full_spectrum_qr_with<L: MatrixLaw>(nu: &L, cfg: &McConfig, exact_log_det: Option<f64>) -> Result<SpectrumEstimate> {
    cfg.validate()?;
    let d = nu.dim();
    if cfg.n_steps < d {
        return Err(Error::InvalidArgument(format!("n_steps must be at least the dimension {d}")));
    }
    let trials: Vec<QrTrial> = map_indexed(cfg.n_trials, |t| qr_trial(nu, cfg, t)).into_iter().collect::<Result<_>>()?;
    let exps: Vec<Vec<f64>> = trials.iter().map(|t| t.exps.clone()).collect();
    let mut values = Vec::with_capacity(d);
    let mut hw = Vec::with_capacity(d);
    for j in 0..d {
        let (m, h) = mean_half_width(&column(&exps, j));
        values.push(m);
        hw.push(h);
    }
    let (values, hw) = sorted_with(values, hw);
    let estimate = {
        let mut s = CompensatedSum::new();
        for v in &values {
            s.add(*v);
        }
        s.value()
    };
    let (realized, sampling_hw) = mean_half_width(&trials.iter().map(|t| t.logdet).collect::<Vec<_>>());
    let exact = exact_log_det.unwrap_or(realized);
    let identity_err = trials.iter().map(|t| t.identity_err).fold(0.0, f64::max);
    if identity_err > 1e-9 {
        return Err(Error::Degenerate(format!("QR log-determinant identity violated by {identity_err:e}")));
    }
    Ok(SpectrumEstimate {
        method: Method::Qr,
        multiplicities: multiplicities(&values, &hw),
        values,
        half_width: hw,
        partial_sums: None,
        partial_sum_half_width: None,
        sum_check: SumCheck {
            estimate,
            exact,
            abs_err: (estimate - exact).abs(),
            realized,
            identity_err,
            sampling_half_width: sampling_hw,
        },
        seed: cfg.seed,
        n_steps: cfg.n_steps,
        n_trials: cfg.n_trials,
    })
}

/// Full spectrum of an atomic measure by QR frame propagation.
pub fn full_spectrum_qr(nu: &AtomicMatrixMeasure, cfg: &McConfig) -> Result<SpectrumEstimate> {
    full_spectrum_qr_with(nu, cfg, Some(nu.mean_log_det()))
}

/// Spectrum from the top exponents s_l of the exterior powers Λ^l ν,
/// λ̂_l = s_l − s_{l−1}. All wedge levels follow the same word in a trial.
pub fn spectrum_via_exterior(nu: &AtomicMatrixMeasure, cfg: &McConfig) -> Result<SpectrumEstimate> {
    cfg.validate()?;
    let d = nu.dim();
    if d > 6 {
        return Err(Error::InvalidArgument(format!("exterior estimator supports d ≤ 6, got {d}")));
    }
    let wedges: Vec<Vec<Matrix>> = (1..=d)
        .map(|l| nu.atoms().iter().map(|a| exterior_power(a, l)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let trials: Vec<Result<Vec<f64>>> = map_indexed(cfg.n_trials, |t| {
        let mut r = rng::stream(cfg.seed, domain::TRIALS, t as u64);
        let mut sr = rng::stream(cfg.seed, domain::START, t as u64);
        let mut vs: Vec<Vector> = wedges.iter().map(|w| unit_vector(w[0].nrows(), &mut sr)).collect();
        let mut bufs: Vec<Vector> = vs.iter().map(|v| Vector::zeros(v.len())).collect();
        let mut acc = vec![CompensatedSum::new(); d];
        for step in 0..cfg.burn_in + cfg.n_steps {
            let i = nu.sample_index(&mut r);
            for l in 0..d {
                bufs[l].gemv(1.0, &wedges[l][i], &vs[l], 0.0);
                let n = bufs[l].norm();
                if !(n > 0.0 && n.is_finite()) {
                    return Err(Error::Singular { det: 0.0, threshold: 0.0 });
                }
                if step >= cfg.burn_in {
                    acc[l].add(n.ln());
                }
                vs[l].copy_from(&bufs[l]);
                vs[l] /= n;
            }
        }
        Ok(acc.iter().map(|a| a.value() / cfg.n_steps as f64).collect())
    });
    let sums: Vec<Vec<f64>> = trials.into_iter().collect::<Result<_>>()?;
    let diffs: Vec<Vec<f64>> = sums
        .iter()
        .map(|s| (0..d).map(|l| if l == 0 { s[0] } else { s[l] - s[l - 1] }).collect())
        .collect();
    let mut partial = Vec::new();
    let mut partial_hw = Vec::new();
    let mut values = Vec::new();
    let mut hw = Vec::new();
    for l in 0..d {
        let (m, h) = mean_half_width(&column(&sums, l));
        partial.push(m);
        partial_hw.push(h);
        let (m, h) = mean_half_width(&column(&diffs, l));
        values.push(m);
        hw.push(h);
    }
    let exact = nu.mean_log_det();
    let estimate = partial[d - 1];
    Ok(SpectrumEstimate {
        method: Method::Exterior,
        multiplicities: multiplicities(&values, &hw),
        values,
        half_width: hw,
        partial_sums: Some(partial),
        partial_sum_half_width: Some(partial_hw.clone()),
        sum_check: SumCheck {
            estimate,
            exact,
            abs_err: (estimate - exact).abs(),
            realized: estimate,
            identity_err: 0.0,
            sampling_half_width: partial_hw[d - 1],
        },
        seed: cfg.seed,
        n_steps: cfg.n_steps,
        n_trials: cfg.n_trials,
    })
}

/// Exact spectrum of a single-atom measure: log-moduli of the eigenvalues.
pub fn deterministic_spectrum(nu: &AtomicMatrixMeasure) -> Result<SpectrumEstimate> {
    if nu.len() != 1 {
        return Err(Error::InvalidArgument("exact spectrum needs a single-atom measure".into()));
    }
    let a = &nu.atoms()[0];
    let mut values: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.norm().ln()).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    let d = values.len();
    let exact = nu.mean_log_det();
    let estimate: f64 = values.iter().sum();
    Ok(SpectrumEstimate {
        method: Method::Exact,
        multiplicities: multiplicities(&values, &vec![0.0; d]),
        values,
        half_width: vec![0.0; d],
        partial_sums: None,
        partial_sum_half_width: None,
        sum_check: SumCheck {
            estimate,
            exact,
            abs_err: (estimate - exact).abs(),
            realized: exact,
            identity_err: 0.0,
            sampling_half_width: 0.0,
        },
        seed: 0,
        n_steps: 0,
        n_trials: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> Matrix {
        Matrix::from_diagonal(&Vector::from_column_slice(v))
    }

    #[test]
    fn deterministic_diagonal_top_exponent() {
        let nu = AtomicMatrixMeasure::dirac(diag(&[3.0, 1.0 / 3.0])).unwrap();
        let t = top_exponent(&nu, &McConfig::new(2000, 4, 1)).unwrap();
        assert!((t.estimate - 3f64.ln()).abs() < 1e-12);
        assert!(t.half_width < 1e-12);
    }

    #[test]
    fn deterministic_diagonal_full_spectrum() {
        let nu = AtomicMatrixMeasure::dirac(diag(&[3.0, 1.0, 1.0 / 3.0])).unwrap();
        let s = full_spectrum_qr(&nu, &McConfig::new(2000, 2, 1)).unwrap();
        let l3 = 3f64.ln();
        for (a, b) in s.values.iter().zip([l3, 0.0, -l3]) {
            assert!((a - b).abs() < 1e-12, "{:?}", s.values);
        }
        let e = spectrum_via_exterior(&nu, &McConfig::new(2000, 2, 1)).unwrap();
        let ps = e.partial_sums.unwrap();
        for (a, b) in ps.iter().zip([l3, l3, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in e.values.iter().zip([l3, 0.0, -l3]) {
            assert!((a - b).abs() < 1e-12);
        }
        let x = deterministic_spectrum(&nu).unwrap();
        assert!((x.values[0] - l3).abs() < 1e-15);
        assert_eq!(x.multiplicities, vec![1, 1, 1]);
    }

    #[test]
    fn multiplicity_grouping() {
        assert_eq!(multiplicities(&[1.0, 0.99, 0.0], &[0.01, 0.01, 0.01]), vec![2, 1]);
    }

    #[test]
    fn report_serializes_with_documented_keys() {
        let nu = AtomicMatrixMeasure::dirac(diag(&[2.0, 0.5])).unwrap();
        let s = full_spectrum_qr(&nu, &McConfig::new(100, 2, 5)).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        for k in ["method", "lambda", "half_width", "sum_check", "seed", "n_steps", "n_trials"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        for k in ["estimate", "exact", "abs_err"] {
            assert!(v["sum_check"].get(k).is_some());
        }
        assert_eq!(v["method"], "qr");
    }
}
