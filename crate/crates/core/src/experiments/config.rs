use super::builders;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SubspacePoint};
use crate::lyapunov::Method;
use crate::margulis::MargulisParams;
use crate::measures::AtomicMatrixMeasure;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

/// Where the measure comes from. `path` is relative to the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    Path(String),
    Inline(Value),
    Example32 {
        sigma: f64,
        theta: f64,
        #[serde(default = "half")]
        p: f64,
    },
    Kifer {
        t: f64,
    },
}

fn half() -> f64 {
    0.5
}

impl MeasureSpec {
    pub fn build(&self, base_dir: &Path) -> Result<AtomicMatrixMeasure> {
        match self {
            MeasureSpec::Path(p) => AtomicMatrixMeasure::load(&base_dir.join(p)),
            MeasureSpec::Inline(v) => AtomicMatrixMeasure::from_json_str(&v.to_string()),
            MeasureSpec::Example32 { sigma, theta, p } => builders::example32(*sigma, *theta, *p),
            MeasureSpec::Kifer { t } => builders::kifer(*t),
        }
    }
}

/// A subspace of ℝ^d given by coordinate axes, spanning columns, or the
/// equator found by search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SubspaceSpec {
    Coordinate(Vec<usize>),
    Columns(Vec<Vec<f64>>),
    Equator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Value(f64),
    Named(NamedTheta),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedTheta {
    Golden,
}

impl ThetaSpec {
    pub fn value(&self) -> f64 {
        match self {
            ThetaSpec::Value(v) => *v,
            ThetaSpec::Named(NamedTheta::Golden) => (5f64.sqrt() - 1.0) / 2.0,
        }
    }
}

/// How the base measure moves with h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Direction {
    /// Atom `atom` gets h added at (row, col).
    Entry { atom: usize, row: usize, col: usize },
    /// Weight h moves from atom `from` to atom `to`.
    Weight { from: usize, to: usize },
    /// Every atom is conjugated by the rotation by angle h in the plane of
    /// axes `plane` (default: first and last).
    Conjugation {
        #[serde(default)]
        plane: Option<(usize, usize)>,
    },
}

impl Direction {
    pub fn apply(&self, nu: &AtomicMatrixMeasure, h: f64) -> Result<AtomicMatrixMeasure> {
        let d = nu.dim();
        match self {
            Direction::Entry { atom, row, col } => {
                if *atom >= nu.len() || *row >= d || *col >= d {
                    return Err(Error::InvalidArgument(format!("entry ({atom}, {row}, {col}) out of range")));
                }
                let atoms = nu
                    .iter()
                    .enumerate()
                    .map(|(i, (p, a))| {
                        let mut a = a.clone();
                        if i == *atom {
                            a[(*row, *col)] += h;
                        }
                        (p, a)
                    })
                    .collect();
                AtomicMatrixMeasure::new(atoms)
            }
            Direction::Weight { from, to } => {
                if *from >= nu.len() || *to >= nu.len() || from == to {
                    return Err(Error::InvalidArgument(format!("weight direction {from} → {to} invalid")));
                }
                let mut w = nu.weights().to_vec();
                w[*from] -= h;
                w[*to] += h;
                AtomicMatrixMeasure::new(w.into_iter().zip(nu.atoms().iter().cloned()).collect())
            }
            Direction::Conjugation { plane } => {
                let (i, j) = plane.unwrap_or((0, d - 1));
                if i >= d || j >= d || i == j {
                    return Err(Error::InvalidArgument(format!("rotation plane ({i}, {j}) invalid")));
                }
                let mut u = Matrix::identity(d, d);
                let (c, s) = (h.cos(), h.sin());
                u[(i, i)] = c;
                u[(j, j)] = c;
                u[(i, j)] = -s;
                u[(j, i)] = s;
                let ut = u.transpose();
                nu.map_atoms(|a| &u * a * &ut)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub measure: MeasureSpec,
    pub seed: u64,
    pub n_steps: usize,
    pub n_trials: usize,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub burn_in: Option<usize>,
    /// Expected exponents; checked against `tolerance` when given.
    #[serde(default)]
    pub expected: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerance: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationaryConfig {
    pub measure: MeasureSpec,
    pub seed: u64,
    pub n_iters: usize,
    #[serde(default = "default_prune")]
    pub prune_floor: f64,
    #[serde(default = "default_max_atoms")]
    pub max_atoms: usize,
    /// Budget for the λ̂_1 reference value.
    pub n_steps: usize,
    pub n_trials: usize,
    #[serde(default = "default_furstenberg_tol")]
    pub furstenberg_tol: f64,
}

fn default_prune() -> f64 {
    1e-12
}
fn default_max_atoms() -> usize {
    2048
}
fn default_furstenberg_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KiferConfig {
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub n_steps: usize,
    pub n_trials: usize,
    /// Bound on |λ̂_1(t)| for t > 0.
    #[serde(default = "default_jump_tol")]
    pub jump_tol: f64,
    /// Lower bound on λ_1(0) − λ̂_1(t) for t > 0.
    #[serde(default = "default_min_gap")]
    pub min_gap: f64,
}

fn default_jump_tol() -> f64 {
    0.02
}
fn default_min_gap() -> f64 {
    0.6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LthetaConfig {
    pub seed: u64,
    pub theta_grid: Vec<ThetaSpec>,
    pub k_trunc: usize,
    pub n_steps: usize,
    pub n_trials: usize,
    #[serde(default = "default_ltheta_tol")]
    pub tolerance: f64,
}

fn default_ltheta_tol() -> f64 {
    0.01
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example32Tolerances {
    pub lambda: [f64; 3],
    pub sum: f64,
    pub equator: f64,
}

impl Default for Example32Tolerances {
    fn default() -> Self {
        Self { lambda: [0.05, 0.02, 0.05], sum: 1e-9, equator: 1e-6 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example32Config {
    pub seed: u64,
    pub sigma: f64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "half")]
    pub p: f64,
    pub n_steps: usize,
    pub n_trials: usize,
    /// Budget of the restricted-exponent comparisons in equator detection.
    pub equator_steps: usize,
    pub equator_trials: usize,
    #[serde(default)]
    pub tolerances: Example32Tolerances,
}

fn default_theta() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub measure: MeasureSpec,
    pub seed: u64,
    pub direction: Direction,
    pub h_grid: Vec<f64>,
    pub n_steps: usize,
    pub n_trials: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftConfig {
    pub measure: MeasureSpec,
    pub seed: u64,
    pub subspace: SubspaceSpec,
    pub n_list: Vec<usize>,
    pub n_samples: usize,
    pub band: (f64, f64),
    #[serde(default = "one")]
    pub rank: usize,
    /// Radius of the ambient neighborhood, used for default parameters.
    #[serde(default = "default_eps")]
    pub eps_r: f64,
    /// `n` is overwritten by each entry of `n_list`.
    #[serde(default)]
    pub params: Option<MargulisParams>,
    #[serde(default = "default_min_r2")]
    pub min_r2: f64,
}

fn one() -> usize {
    1
}
fn default_eps() -> f64 {
    0.1
}
fn default_min_r2() -> f64 {
    0.8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepellerConfig {
    pub measure: MeasureSpec,
    pub seed: u64,
    pub subspace: SubspaceSpec,
    pub n_list: Vec<usize>,
    pub n_samples: usize,
    pub band: (f64, f64),
    #[serde(default = "default_min_r2")]
    pub min_r2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MargulisCheckConfig {
    pub measure: MeasureSpec,
    pub seed: u64,
    pub subspace: SubspaceSpec,
    pub rank: usize,
    pub n: usize,
    pub n_samples: usize,
    pub band: (f64, f64),
    #[serde(default = "default_eps")]
    pub eps_r: f64,
    #[serde(default)]
    pub params: Option<MargulisParams>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Spectrum(SpectrumConfig),
    Stationary(StationaryConfig),
    Kifer(KiferConfig),
    Ltheta(LthetaConfig),
    Example32(Example32Config),
    Sweep(SweepConfig),
    Drift(DriftConfig),
    Repeller(RepellerConfig),
    MargulisCheck(MargulisCheckConfig),
}

pub const EXPERIMENTS: [&str; 9] =
    ["spectrum", "stationary", "kifer", "ltheta", "example32", "sweep", "drift", "repeller", "margulis-check"];

impl ExperimentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::Spectrum(_) => "spectrum",
            ExperimentConfig::Stationary(_) => "stationary",
            ExperimentConfig::Kifer(_) => "kifer",
            ExperimentConfig::Ltheta(_) => "ltheta",
            ExperimentConfig::Example32(_) => "example32",
            ExperimentConfig::Sweep(_) => "sweep",
            ExperimentConfig::Drift(_) => "drift",
            ExperimentConfig::Repeller(_) => "repeller",
            ExperimentConfig::MargulisCheck(_) => "margulis-check",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Spectrum(c) => c.seed,
            ExperimentConfig::Stationary(c) => c.seed,
            ExperimentConfig::Kifer(c) => c.seed,
            ExperimentConfig::Ltheta(c) => c.seed,
            ExperimentConfig::Example32(c) => c.seed,
            ExperimentConfig::Sweep(c) => c.seed,
            ExperimentConfig::Drift(c) => c.seed,
            ExperimentConfig::Repeller(c) => c.seed,
            ExperimentConfig::MargulisCheck(c) => c.seed,
        }
    }

    /// Parse a config document. `experiment` fills in a missing tag and must
    /// agree with a present one; `seed` replaces any seed in the document.
    pub fn from_value(mut v: Value, experiment: Option<&str>, seed: Option<u64>) -> Result<(Self, Value)> {
        let obj = v.as_object_mut().ok_or_else(|| Error::Parse("config must be a JSON object".into()))?;
        if let Some(name) = experiment {
            if !EXPERIMENTS.contains(&name) {
                return Err(Error::Parse(format!("unknown experiment `{name}`, expected one of {}", EXPERIMENTS.join(", "))));
            }
            match obj.get("experiment") {
                None => {
                    obj.insert("experiment".into(), Value::from(name));
                }
                Some(found) if found.as_str() == Some(name) => {}
                Some(found) => return Err(Error::Parse(format!("config is for experiment {found}, not `{name}`"))),
            }
        }
        if let Some(s) = seed {
            obj.insert("seed".into(), Value::from(s));
        }
        let cfg = serde_json::from_value(v.clone())?;
        Ok((cfg, v))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(Self::from_value(serde_json::from_str(s)?, None, None)?.0)
    }
}

impl SubspaceSpec {
    /// The subspace, or `None` for `equator`.
    pub fn explicit(&self, d: usize) -> Result<Option<SubspacePoint>> {
        match self {
            SubspaceSpec::Coordinate(idx) => {
                if idx.is_empty() || idx.iter().any(|i| *i >= d) {
                    return Err(Error::InvalidArgument(format!("coordinate axes {idx:?} invalid in dimension {d}")));
                }
                Ok(Some(SubspacePoint::coordinate(d, idx)))
            }
            SubspaceSpec::Columns(cols) => {
                if cols.is_empty() || cols.iter().any(|c| c.len() != d) {
                    return Err(Error::InvalidArgument(format!("columns must be nonempty vectors of length {d}")));
                }
                let m = Matrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
                Ok(Some(SubspacePoint::from_columns(&m)?))
            }
            SubspaceSpec::Equator => Ok(None),
        }
    }
}
