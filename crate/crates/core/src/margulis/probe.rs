use super::functions::psi_r;
use super::homogeneous::sample_homogeneous_flag_with;
use super::params::MargulisParams;
use crate::error::{Error, Result};
use crate::linalg::{random::haar_frame_in, subspace_distance, FlagPoint, Matrix, SubspacePoint};
use crate::measures::{support_constants, AtomicMatrixMeasure};
use crate::parallel;
use crate::rng::{self, domain, StreamRng};
use crate::stationary::invariant_residual;
use crate::stats::{linear_fit, mean_half_width, median};
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub n: usize,
    pub n_samples: usize,
    /// Distances to E of the sampled starting points, drawn log-uniformly.
    pub band: (f64, f64),
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub n: usize,
    pub samples: usize,
    pub mean_drift: f64,
    pub half_width: f64,
    pub median: f64,
    pub fraction_decreasing: f64,
    /// (min, max) observed increments.
    pub band: (f64, f64),
    /// Sample-wise upper bound on an increment over n steps.
    pub c_bound: f64,
    pub bound_violations: usize,
    pub seed: u64,
}

impl DriftReport {
    pub const CSV_HEADER: &'static str = "n,samples,mean_drift,fraction_decreasing,min_inc,max_inc,C_bound,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n, self.samples, self.mean_drift, self.fraction_decreasing, self.band.0, self.band.1, self.c_bound, self.seed
        )
    }

    fn from_increments(incs: Vec<f64>, cfg: &ProbeConfig, c_bound: f64) -> Result<Self> {
        if incs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite increment (a point reached the equator exactly)".into()));
        }
        let (mean, hw) = mean_half_width(&incs);
        Ok(Self {
            n: cfg.n,
            samples: incs.len(),
            mean_drift: mean,
            half_width: hw,
            median: median(&incs),
            fraction_decreasing: incs.iter().filter(|v| **v < 0.0).count() as f64 / incs.len() as f64,
            band: (incs.iter().cloned().fold(f64::INFINITY, f64::min), incs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
            c_bound,
            bound_violations: incs.iter().filter(|v| **v > c_bound).count(),
            seed: cfg.seed,
        })
    }
}

/// Least-squares slope and R² of the mean (or median) increment against n.
pub fn drift_trend(reports: &[DriftReport], use_median: bool) -> (f64, f64) {
    let xs: Vec<f64> = reports.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = reports.iter().map(|r| if use_median { r.median } else { r.mean_drift }).collect();
    let (_, slope, r2) = linear_fit(&xs, &ys);
    (slope, r2)
}

fn check(nu: &AtomicMatrixMeasure, e: &SubspacePoint, cfg: &ProbeConfig) -> Result<()> {
    let res = invariant_residual(nu.atoms(), e);
    if res > 1e-8 {
        return Err(Error::NotInvariant { residual: res, tol: 1e-8 });
    }
    let (lo, hi) = cfg.band;
    if !(lo > 0.0 && lo <= hi && hi < 1.0) || cfg.n_samples == 0 {
        return Err(Error::InvalidArgument(format!("need 0 < lo ≤ hi < 1 and samples > 0, got {:?}", cfg.band)));
    }
    Ok(())
}

pub(crate) fn log_uniform(rng: &mut StreamRng, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// An r-subspace at distance exactly `s` from E (r ≤ dim E < d).
pub(crate) fn subspace_near(e: &SubspacePoint, r: usize, s: f64, rng: &mut StreamRng) -> Result<SubspacePoint> {
    let (d, k) = (e.dim_ambient(), e.dim_sub());
    let w = haar_frame_in(e.frame(), r, rng);
    let u = haar_frame_in(&e.complement_frame(), 1, rng);
    let c = (1.0 - s * s).sqrt();
    let mut m = Matrix::zeros(d, r);
    m.copy_from(&w);
    m.set_column(0, &(w.column(0) * c + u.column(0) * s));
    debug_assert!(k >= r);
    SubspacePoint::from_columns(&m)
}

fn act_word(nu: &AtomicMatrixMeasure, x: &FlagPoint, xp: &FlagPoint, n: usize, rng: &mut StreamRng) -> Result<(FlagPoint, FlagPoint)> {
    let (mut a, mut b) = (x.clone(), xp.clone());
    for _ in 0..n {
        let g = &nu.atoms()[nu.sample_index(rng)];
        a = a.act(g)?;
        b = b.act(g)?;
    }
    Ok((a, b))
}

/// Monte Carlo distribution of −log ψ_r(gx, gx') + log ψ_r(x, x') for flag
/// pairs near E and words g of length n.
pub fn drift_probe(nu: &AtomicMatrixMeasure, e: &SubspacePoint, params: &MargulisParams, cfg: &ProbeConfig) -> Result<DriftReport> {
    check(nu, e, cfg)?;
    let r = params.rank();
    if r > e.dim_sub() || e.dim_sub() >= nu.dim() {
        return Err(Error::InvalidArgument(format!("rank {r} flags cannot lie near a {}-dimensional E", e.dim_sub())));
    }
    let sc = support_constants(nu, 0.0);
    let c2: f64 = params.gamma.iter().map(|g| sc.b + g * sc.a).sum();
    let c_bound = c2 * cfg.n as f64;
    let incs: Vec<Result<f64>> = parallel::map_indexed(cfg.n_samples, |i| {
        let mut rng = rng::stream(cfg.seed, domain::PAIRS, i as u64);
        let mut draw = || -> Result<FlagPoint> {
            let s = log_uniform(&mut rng, cfg.band);
            let f = subspace_near(e, r, s, &mut rng)?;
            Ok(sample_homogeneous_flag_with(&f, false, e, &mut rng)?.flag)
        };
        let (x, xp) = (draw()?, draw()?);
        let before = psi_r(&x, &xp, e, params)?;
        let (gx, gxp) = act_word(nu, &x, &xp, cfg.n, &mut rng::stream(cfg.seed, domain::TRIALS, i as u64))?;
        Ok(before.ln() - psi_r(&gx, &gxp, e, params)?.ln())
    });
    DriftReport::from_increments(incs.into_iter().collect::<Result<_>>()?, cfg, c_bound)
}

/// Monte Carlo distribution of −log d(gx, E) + log d(x, E) for lines x
/// near E and words g of length n.
pub fn repeller_probe(nu: &AtomicMatrixMeasure, e: &SubspacePoint, cfg: &ProbeConfig) -> Result<DriftReport> {
    check(nu, e, cfg)?;
    if e.dim_sub() >= nu.dim() {
        return Err(Error::InvalidArgument("E must be a proper subspace".into()));
    }
    let c_bound = support_constants(nu, 0.0).b * cfg.n as f64;
    let incs: Vec<Result<f64>> = parallel::map_indexed(cfg.n_samples, |i| {
        let mut rng = rng::stream(cfg.seed, domain::PAIRS, i as u64);
        let s = log_uniform(&mut rng, cfg.band);
        let x = FlagPoint::with_top(&subspace_near(e, 1, s, &mut rng)?, &Matrix::identity(1, 1))?;
        let (gx, _) = act_word(nu, &x, &x, cfg.n, &mut rng::stream(cfg.seed, domain::TRIALS, i as u64))?;
        Ok(subspace_distance(&x.top(), e)?.ln() - subspace_distance(&gx.top(), e)?.ln())
    });
    DriftReport::from_increments(incs.into_iter().collect::<Result<_>>()?, cfg, c_bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometry_has_no_drift() {
        let t = 0.7f64;
        let g = Matrix::from_row_slice(3, 3, &[t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0]);
        let nu = AtomicMatrixMeasure::dirac(g).unwrap();
        let e = SubspacePoint::coordinate(3, &[0, 1]);
        let params = MargulisParams::defaults(1, 0.1, 5, 2.0);
        let cfg = ProbeConfig { n: 5, n_samples: 64, band: (1e-4, 1e-3), seed: 1 };
        let d = drift_probe(&nu, &e, &params, &cfg).unwrap();
        assert!(d.mean_drift.abs() < 1e-8 && d.band.1 < 1e-8, "{d:?}");
        let rp = repeller_probe(&nu, &e, &cfg).unwrap();
        assert!(rp.band.0.abs() < 1e-10 && rp.band.1.abs() < 1e-10);
    }

    #[test]
    fn non_invariant_rejected() {
        let g = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        let nu = AtomicMatrixMeasure::dirac(g).unwrap();
        let cfg = ProbeConfig { n: 2, n_samples: 4, band: (1e-4, 1e-3), seed: 1 };
        assert!(repeller_probe(&nu, &SubspacePoint::coordinate(2, &[0]), &cfg).is_err());
    }
}
