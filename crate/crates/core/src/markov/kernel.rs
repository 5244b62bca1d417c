use crate::error::{Error, Result};
use crate::stats::CompensatedSum;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const ROW_SUM_TOL: f64 = 1e-12;

/// Row-stochastic matrix; row x is the transition law σ_x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct FiniteMarkovKernel {
    rows: Vec<Vec<f64>>,
    labels: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelRepr {
    rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Vec<f64>>>,
}

impl TryFrom<KernelRepr> for FiniteMarkovKernel {
    type Error = Error;
    fn try_from(r: KernelRepr) -> Result<Self> {
        let k = FiniteMarkovKernel::new(r.rows)?;
        match r.labels {
            Some(l) => k.with_labels(l),
            None => Ok(k),
        }
    }
}

impl From<FiniteMarkovKernel> for KernelRepr {
    fn from(k: FiniteMarkovKernel) -> Self {
        KernelRepr { rows: k.rows, labels: k.labels }
    }
}

pub(crate) fn mass(v: &[f64], idx: impl IntoIterator<Item = usize>) -> f64 {
    let mut s = CompensatedSum::new();
    for i in idx {
        s.add(v[i]);
    }
    s.value()
}

impl FiniteMarkovKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("kernel needs at least one state".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            if let Some(&x) = row.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::InvalidMeasure(format!("row {i} has entry {x}")));
            }
            let s = mass(row, 0..n);
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidMeasure(format!("row {i} sums to {s}")));
            }
        }
        Ok(Self { rows, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != self.n_states() {
            return Err(Error::DimensionMismatch { expected: self.n_states(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn labels(&self) -> Option<&[Vec<f64>]> {
        self.labels.as_deref()
    }

    /// 𝓣ψ(x) = Σ_y ψ(y) σ_x(y).
    pub fn apply(&self, psi: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                let mut s = CompensatedSum::new();
                r.iter().zip(psi).for_each(|(p, v)| if *p > 0.0 { s.add(p * v) });
                s.value()
            })
            .collect()
    }

    /// 𝓣^*ζ = Σ_x ζ(x) σ_x.
    pub fn push(&self, zeta: &[f64]) -> Vec<f64> {
        let n = self.n_states();
        (0..n)
            .map(|y| {
                let mut s = CompensatedSum::new();
                (0..n).for_each(|x| s.add(zeta[x] * self.rows[x][y]));
                s.value()
            })
            .collect()
    }

    /// ‖ζ𝓣 − ζ‖₁.
    pub fn stationarity_residual(&self, zeta: &[f64]) -> f64 {
        self.push(zeta).iter().zip(zeta).map(|(a, b)| (a - b).abs()).sum()
    }

    /// Unique stationary probability vector; errors if it is not unique.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let n = self.n_states();
        let mut m = DMatrix::from_fn(n, n, |i, j| self.rows[j][i] - if i == j { 1.0 } else { 0.0 });
        m.row_mut(n - 1).fill(1.0);
        let mut b = DVector::zeros(n);
        b[n - 1] = 1.0;
        let lu = m.clone().lu();
        let mut x = lu.solve(&b).ok_or_else(|| Error::Degenerate("stationary vector is not unique".into()))?;
        let r = &b - &m * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }
        if x.iter().any(|v| !v.is_finite() || *v < -1e-9) {
            return Err(Error::Degenerate("stationary vector is not unique".into()));
        }
        let mut v: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        let s = mass(&v, 0..n);
        v.iter_mut().for_each(|x| *x /= s);
        Ok(v)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernel serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
