use super::space::SpacePoint;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, ProjectivePoint};
use crate::measures::AtomicMatrixMeasure;
use crate::rng::{self, domain};
use crate::stats::CompensatedSum;
use crate::transport::transport_cost;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A weighted point cloud on one of the homogeneous spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure<P> {
    space: String,
    weights: Vec<f64>,
    points: Vec<P>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomFile {
    w: f64,
    point: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    space: String,
    atoms: Vec<AtomFile>,
}

/// Atom pruning: merge atoms within `merge_tol`, drop weights below `floor`
/// and, if `max_atoms` is set, coarsen a grid until the cap is met.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PruneOptions {
    pub merge_tol: f64,
    pub floor: f64,
    pub max_atoms: Option<usize>,
}

impl Default for PruneOptions {
    fn default() -> Self {
        Self { merge_tol: 1e-9, floor: 1e-12, max_atoms: None }
    }
}

impl<P: SpacePoint> EmpiricalMeasure<P> {
    pub fn new(atoms: Vec<(f64, P)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("empirical measure has no atoms".into()));
        }
        let space = atoms[0].1.tag();
        let mut total = 0.0;
        for (i, (w, p)) in atoms.iter().enumerate() {
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom {i}: weight {w} is not positive")));
            }
            if p.tag() != space {
                return Err(Error::InvalidMeasure(format!("atom {i} lives in {} not {space}", p.tag())));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        let (weights, points) = atoms.into_iter().unzip();
        Ok(Self { space, weights, points })
    }

    fn from_parts(space: String, weights: Vec<f64>, points: Vec<P>) -> Self {
        Self { space, weights, points }
    }

    pub fn dirac(p: P) -> Self {
        Self { space: p.tag(), weights: vec![1.0], points: vec![p] }
    }

    pub fn uniform(points: Vec<P>) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        Self::new(points.into_iter().map(|p| (w, p)).collect())
    }

    pub fn space(&self) -> &str {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &P)> {
        self.weights.iter().cloned().zip(self.points.iter())
    }

    pub fn total_mass(&self) -> f64 {
        let mut s = CompensatedSum::new();
        for w in &self.weights {
            s.add(*w);
        }
        s.value()
    }

    fn normalized(mut self) -> Self {
        let t = self.total_mass();
        for w in &mut self.weights {
            *w /= t;
        }
        self
    }

    /// Convex combination (1 − s)·self + s·other.
    pub fn mix(&self, other: &Self, s: f64) -> Self {
        let mut weights: Vec<f64> = self.weights.iter().map(|w| w * (1.0 - s)).collect();
        weights.extend(other.weights.iter().map(|w| w * s));
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        Self::from_parts(self.space.clone(), weights, points)
    }

    /// Quantize on a grid of cell size `h` in the canonical embedding and
    /// replace each cell by the barycenter of its atoms.
    fn quantize(&self, h: f64) -> Self {
        let mut cells: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.points.iter().enumerate() {
            let key: Vec<i64> = p.embedding().iter().map(|x| (x / h).round() as i64).collect();
            cells.entry(key).or_default().push(i);
        }
        let mut weights = Vec::with_capacity(cells.len());
        let mut points = Vec::with_capacity(cells.len());
        for idx in cells.values() {
            let w: f64 = idx.iter().map(|&i| self.weights[i]).sum();
            let p = if idx.len() == 1 {
                self.points[idx[0]].clone()
            } else {
                let items: Vec<(f64, &P)> = idx.iter().map(|&i| (self.weights[i], &self.points[i])).collect();
                P::barycenter(&items)
            };
            weights.push(w);
            points.push(p);
        }
        Self::from_parts(self.space.clone(), weights, points)
    }

    /// Smallest grid (by doubling from `h0`) that brings the atom count to at
    /// most `cap`.
    fn coarsen(&self, cap: usize, h0: f64) -> (Self, f64) {
        let mut h = h0;
        loop {
            let q = self.quantize(h);
            if q.len() <= cap || h > 4.0 {
                return (q, h);
            }
            h *= 2.0;
        }
    }

    pub fn prune(&self, opts: &PruneOptions) -> Self {
        let heaviest = self.weights.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.weights[i] >= opts.floor || self.weights[i] == heaviest).collect();
        let kept = Self::from_parts(
            self.space.clone(),
            keep.iter().map(|&i| self.weights[i]).collect(),
            keep.iter().map(|&i| self.points[i].clone()).collect(),
        )
        .normalized();
        let merged = kept.quantize(opts.merge_tol);
        match opts.max_atoms {
            Some(cap) if merged.len() > cap => merged.coarsen(cap, 2.0 * opts.merge_tol).0,
            _ => merged,
        }
    }

    pub fn to_json_string(&self) -> String {
        let file = MeasureFile {
            space: self.space.clone(),
            atoms: self.iter().map(|(w, p)| AtomFile { w, point: p.columns() }).collect(),
        };
        serde_json::to_string_pretty(&file).expect("measure serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(s)?;
        let mut atoms = Vec::with_capacity(file.atoms.len());
        for (i, a) in file.atoms.into_iter().enumerate() {
            let p = P::from_columns(&a.point, &file.space).map_err(|e| Error::InvalidMeasure(format!("atom {i}: {e}")))?;
            atoms.push((a.w, p));
        }
        let m = Self::new(atoms)?;
        if m.space != file.space {
            return Err(Error::InvalidMeasure(format!("points live in {} but the file says {}", m.space, file.space)));
        }
        Ok(m)
    }
}

/// 𝓟*_ν η: atom (w, x) becomes atoms (w·p_i, A_i x).
pub fn push_measure<P: SpacePoint>(nu: &AtomicMatrixMeasure, eta: &EmpiricalMeasure<P>) -> Result<EmpiricalMeasure<P>> {
    let mut weights = Vec::with_capacity(eta.len() * nu.len());
    let mut points = Vec::with_capacity(eta.len() * nu.len());
    for (w, x) in eta.iter() {
        for (p, a) in nu.iter() {
            weights.push(w * p);
            points.push(x.act(a)?);
        }
    }
    Ok(EmpiricalMeasure::from_parts(eta.space.clone(), weights, points))
}

pub fn push_measure_pruned<P: SpacePoint>(
    nu: &AtomicMatrixMeasure,
    eta: &EmpiricalMeasure<P>,
    opts: &PruneOptions,
) -> Result<EmpiricalMeasure<P>> {
    Ok(push_measure(nu, eta)?.prune(opts))
}

fn distance_matrix<P: SpacePoint>(a: &EmpiricalMeasure<P>, b: &EmpiricalMeasure<P>) -> Vec<Vec<f64>> {
    a.points.iter().map(|x| b.points.iter().map(|y| x.distance(y)).collect()).collect()
}

/// Exact Wasserstein-1 distance for the space metric. Inputs above
/// `max_atoms` atoms are first quantized on a common grid.
pub fn wasserstein<P: SpacePoint>(a: &EmpiricalMeasure<P>, b: &EmpiricalMeasure<P>, max_atoms: usize) -> f64 {
    if a.len() <= max_atoms && b.len() <= max_atoms {
        return transport_cost(&a.weights, &b.weights, &distance_matrix(a, b));
    }
    let (_, h) = a.mix(b, 0.5).coarsen(max_atoms, 1e-6);
    let qa = a.quantize(h);
    let qb = b.quantize(h);
    transport_cost(&qa.weights, &qb.weights, &distance_matrix(&qa, &qb))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryOptions {
    pub n_iters: usize,
    pub seed: u64,
    pub prune_floor: f64,
    pub max_atoms: usize,
    pub cloud: usize,
    pub burn_in: usize,
    pub threshold: f64,
    pub diagnostic_atoms: usize,
}

impl StationaryOptions {
    pub fn new(n_iters: usize, seed: u64) -> Self {
        Self {
            n_iters,
            seed,
            prune_floor: 1e-12,
            max_atoms: 2048,
            cloud: 64,
            burn_in: 50.min(n_iters / 2),
            threshold: 1e-4,
            diagnostic_atoms: 256,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StationaryEstimate<P> {
    pub measure: EmpiricalMeasure<P>,
    /// Wasserstein-1 distance between the last two Cesàro averages.
    pub diagnostic: f64,
    pub converged: bool,
    pub options: StationaryOptions,
}

/// Cesàro averages of 𝓟*-iterates of a uniform random cloud.
pub fn stationary_estimate_from<P: SpacePoint>(
    nu: &AtomicMatrixMeasure,
    template: &P,
    opts: &StationaryOptions,
) -> Result<StationaryEstimate<P>> {
    if opts.n_iters == 0 {
        return Err(Error::InvalidArgument("n_iters must be positive".into()));
    }
    let mut r = rng::stream(opts.seed, domain::CLOUD, 0);
    let cloud: Vec<P> = (0..opts.cloud.max(1)).map(|_| template.random_like(&mut r)).collect();
    let prune = PruneOptions { merge_tol: 1e-9, floor: opts.prune_floor, max_atoms: Some(opts.max_atoms) };
    let mut eta = EmpiricalMeasure::uniform(cloud)?.prune(&prune);
    let mut avg: Option<EmpiricalMeasure<P>> = None;
    let mut prev_avg: Option<EmpiricalMeasure<P>> = None;
    let mut count = 0usize;
    let burn = opts.burn_in.min(opts.n_iters - 1);
    for it in 0..opts.n_iters {
        eta = push_measure_pruned(nu, &eta, &prune)?;
        if it < burn {
            continue;
        }
        count += 1;
        let next = match &avg {
            None => eta.clone(),
            Some(a) => a.mix(&eta, 1.0 / count as f64).prune(&prune),
        };
        prev_avg = avg.replace(next);
    }
    let measure = avg.expect("at least one averaged iterate");
    let diagnostic = match &prev_avg {
        Some(p) => wasserstein(p, &measure, opts.diagnostic_atoms),
        None => f64::INFINITY,
    };
    Ok(StationaryEstimate { converged: diagnostic <= opts.threshold, measure, diagnostic, options: *opts })
}

/// Stationary measure on the projective space of ν.
pub fn stationary_estimate(
    nu: &AtomicMatrixMeasure,
    n_iters: usize,
    seed: u64,
    prune_floor: f64,
) -> Result<StationaryEstimate<ProjectivePoint>> {
    let mut opts = StationaryOptions::new(n_iters, seed);
    opts.prune_floor = prune_floor;
    stationary_estimate_from(nu, &ProjectivePoint::basis(nu.dim(), 0), &opts)
}

/// ∫∫ log(‖g v‖/‖v‖) dν(g) dη(v).
pub fn furstenberg_integral(nu: &AtomicMatrixMeasure, eta: &EmpiricalMeasure<ProjectivePoint>) -> Result<f64> {
    let mut s = CompensatedSum::new();
    for (w, x) in eta.iter() {
        if x.dim() != nu.dim() {
            return Err(Error::DimensionMismatch { expected: nu.dim(), got: x.dim() });
        }
        let v = x.vector();
        for (p, a) in nu.iter() {
            let g: &Matrix = a;
            s.add(p * w * ((g * v).norm() / v.norm()).ln());
        }
    }
    Ok(s.value())
}
