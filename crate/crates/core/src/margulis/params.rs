use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Exponents and levels of the rank-r Margulis function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MargulisParams {
    /// γ_1, …, γ_r.
    pub gamma: Vec<f64>,
    /// β_1, …, β_{r−1}.
    pub beta: Vec<f64>,
    /// ω_1, …, ω_r.
    pub omega: Vec<f64>,
    #[serde(rename = "Omega")]
    pub big_omega: f64,
    pub eps_cut: f64,
    pub n: usize,
    #[serde(rename = "B")]
    pub b: f64,
}

impl MargulisParams {
    /// γ = β = 0.1, ω = 1e-3, Ω = 10⁴ and eps_cut = ε_r/10.
    pub fn defaults(rank: usize, eps_r: f64, n: usize, b: f64) -> Self {
        Self {
            gamma: vec![0.1; rank],
            beta: vec![0.1; rank.saturating_sub(1)],
            omega: vec![1e-3; rank],
            big_omega: 1e4,
            eps_cut: eps_r / 10.0,
            n,
            b,
        }
    }

    pub fn rank(&self) -> usize {
        self.gamma.len()
    }

    /// Check ranges; `eps_r` is the radius of the ambient neighborhood.
    pub fn validate(&self, eps_r: f64) -> Result<()> {
        let r = self.rank();
        let unit = |v: &[f64]| v.iter().all(|x| *x > 0.0 && *x <= 1.0);
        if r == 0 || !unit(&self.gamma) {
            return Err(Error::InvalidArgument("γ must be a nonempty list in (0, 1]".into()));
        }
        if self.beta.len() + 1 != r || !unit(&self.beta) {
            return Err(Error::InvalidArgument(format!("β needs {} entries in (0, 1]", r - 1)));
        }
        if self.omega.len() != r || self.omega.iter().any(|w| *w <= 0.0) {
            return Err(Error::InvalidArgument(format!("ω needs {r} positive entries")));
        }
        if self.big_omega <= 1.0 {
            return Err(Error::InvalidArgument("Ω must exceed 1".into()));
        }
        if !(self.eps_cut > 0.0 && self.eps_cut < eps_r) {
            return Err(Error::InvalidArgument(format!("eps_cut must lie in (0, {eps_r})")));
        }
        if !(self.b > 0.0) {
            return Err(Error::InvalidArgument("B must be positive".into()));
        }
        Ok(())
    }

    /// Truncated parameters for rank r − 1.
    pub fn truncated(&self) -> Option<Self> {
        let r = self.rank();
        (r > 1).then(|| Self {
            gamma: self.gamma[..r - 1].to_vec(),
            beta: self.beta[..r - 2].to_vec(),
            omega: self.omega[..r - 1].to_vec(),
            ..self.clone()
        })
    }

    /// ω_r e^{−Bn}.
    pub fn floor(&self, rank: usize) -> f64 {
        self.omega[rank - 1] * (-self.b * self.n as f64).exp()
    }
}
