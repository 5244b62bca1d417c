//! Config-driven experiments: closed-form examples, continuity sweeps and
//! drift probes, with JSON reports and CSV tables.

pub mod builders;
mod config;
pub mod ltheta;
mod runners;

pub use config::{
    Direction, DriftConfig, Example32Config, Example32Tolerances, ExperimentConfig, KiferConfig, LthetaConfig,
    MargulisCheckConfig, MeasureSpec, NamedTheta, RepellerConfig, SpectrumConfig, StationaryConfig, SubspaceSpec,
    SweepConfig, ThetaSpec, EXPERIMENTS,
};
pub use runners::kifer_walk_oracle;

use crate::error::Result;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub results: Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn new(results: Value) -> Self {
        Self { results, tables: Vec::new(), checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Run an experiment; relative measure paths resolve against `base_dir`.
pub fn run(cfg: &ExperimentConfig, base_dir: &Path) -> Result<Outcome> {
    match cfg {
        ExperimentConfig::Spectrum(c) => runners::spectrum(c, base_dir),
        ExperimentConfig::Stationary(c) => runners::stationary(c, base_dir),
        ExperimentConfig::Kifer(c) => runners::kifer(c),
        ExperimentConfig::Ltheta(c) => runners::ltheta(c),
        ExperimentConfig::Example32(c) => runners::example32(c),
        ExperimentConfig::Sweep(c) => runners::sweep(c, base_dir),
        ExperimentConfig::Drift(c) => runners::drift(c, base_dir),
        ExperimentConfig::Repeller(c) => runners::repeller(c, base_dir),
        ExperimentConfig::MargulisCheck(c) => runners::margulis_check(c, base_dir),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub library: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: String,
    pub config: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(experiment: &str, config: Value, outcome: &Outcome) -> Self {
        Self {
            experiment: experiment.into(),
            config,
            results: outcome.results.clone(),
            checks: outcome.checks.clone(),
            passed: outcome.passed(),
            provenance: Provenance { library: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") },
        }
    }
}

/// Write `report.json` and one `<table>.csv` per table; returns the paths.
pub fn write_outputs(dir: &Path, report: &Report, tables: &[Table]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    let mut written = vec![path];
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&t.header)?;
        for row in &t.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}

fn example32_measure() -> Value {
    json!({"example32": {"sigma": 2.0, "theta": 0.1}})
}

/// A runnable default config for every experiment.
pub fn templates() -> Vec<(&'static str, Value)> {
    let ln2 = std::f64::consts::LN_2;
    vec![
        (
            "spectrum",
            json!({"experiment": "spectrum", "measure": example32_measure(), "seed": 1, "n_steps": 100_000, "n_trials": 64,
                   "expected": [ln2, 0.0, -ln2], "tolerance": [0.05, 0.02, 0.05]}),
        ),
        (
            "stationary",
            json!({"experiment": "stationary", "measure": example32_measure(), "seed": 2, "n_iters": 200,
                   "n_steps": 20_000, "n_trials": 32}),
        ),
        (
            "kifer",
            json!({"experiment": "kifer", "seed": 3, "t_grid": [0.0, 0.05, 0.1, 0.2], "n_steps": 1_000_000, "n_trials": 16}),
        ),
        (
            "ltheta",
            json!({"experiment": "ltheta", "seed": 4, "theta_grid": [0.0, 0.25, "golden", 0.1], "k_trunc": 40,
                   "n_steps": 1_000_000, "n_trials": 16}),
        ),
        (
            "example32",
            json!({"experiment": "example32", "seed": 5, "sigma": 2.0, "theta": 0.1, "n_steps": 100_000, "n_trials": 64,
                   "equator_steps": 20_000, "equator_trials": 16}),
        ),
        (
            "sweep",
            json!({"experiment": "sweep", "measure": example32_measure(), "seed": 6,
                   "direction": {"kind": "entry", "atom": 0, "row": 0, "col": 0},
                   "h_grid": [0.0, 0.1, 0.05, 0.025], "n_steps": 20_000, "n_trials": 32}),
        ),
        (
            "drift",
            json!({"experiment": "drift", "measure": example32_measure(), "seed": 7, "subspace": {"coordinate": [2]},
                   "n_list": [10, 20, 40], "n_samples": 1000, "band": [1e-20, 1e-19]}),
        ),
        (
            "repeller",
            json!({"experiment": "repeller", "measure": example32_measure(), "seed": 8, "subspace": {"coordinate": [2]},
                   "n_list": [10, 20, 40], "n_samples": 1000, "band": [1e-20, 1e-19]}),
        ),
        (
            "margulis-check",
            json!({"experiment": "margulis-check", "measure": example32_measure(), "seed": 9, "subspace": {"coordinate": [2]},
                   "rank": 1, "n": 10, "n_samples": 500, "band": [1e-6, 1e-5]}),
        ),
    ]
}
