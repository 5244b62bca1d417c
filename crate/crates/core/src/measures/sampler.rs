use super::atomic::{AtomicMatrixMeasure, MatrixLaw};
use crate::error::{Error, Result};
use crate::linalg::{check_invertible, expm, op_norm, Matrix, INVERTIBILITY_TOL};
use crate::rng::{self, domain};
use rand::Rng;
use std::borrow::Cow;

pub const DEFAULT_CONVOLUTION_CAP: usize = 4096;

#[derive(Debug, Clone)]
enum Kind {
    Word { n: usize },
    Smooth { log_radius: f64 },
}

/// A seeded matrix law: `draw_at(i)` is a pure function of `(seed, i)`.
#[derive(Debug, Clone)]
pub struct MatrixSampler {
    base: AtomicMatrixMeasure,
    kind: Kind,
    seed: u64,
    norm_bound: f64,
}

/// Result of an n-fold convolution.
#[derive(Debug, Clone)]
pub enum Convolution {
    Exact(AtomicMatrixMeasure),
    Sampled(MatrixSampler),
}

impl MatrixSampler {
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Declared sup of ‖g‖ and ‖g⁻¹‖ over the support.
    pub fn support_norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn draw_at(&self, index: u64) -> Matrix {
        let mut r = rng::stream(self.seed, domain::SMOOTH, index);
        self.draw_with(&mut r)
    }

    fn draw_with<R: Rng + ?Sized>(&self, r: &mut R) -> Matrix {
        match self.kind {
            Kind::Word { n } => {
                let mut g = self.base.atoms()[self.base.sample_index(r)].clone();
                for _ in 1..n {
                    g = &self.base.atoms()[self.base.sample_index(r)] * g;
                }
                g
            }
            Kind::Smooth { log_radius } => {
                let a = &self.base.atoms()[self.base.sample_index(r)];
                a * ball_element(self.dim(), log_radius, r)
            }
        }
    }

    /// An atomic measure of `n` equally weighted draws `draw_at(0..n)`.
    pub fn empiricalize(&self, n: usize) -> Result<AtomicMatrixMeasure> {
        AtomicMatrixMeasure::uniform((0..n as u64).map(|i| self.draw_at(i)).collect())
    }
}

impl MatrixLaw for MatrixSampler {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn draw<'a, R: Rng + ?Sized>(&'a self, rng: &mut R) -> Cow<'a, Matrix> {
        Cow::Owned(self.draw_with(rng))
    }
}

/// h = exp(M) with ‖M‖ ≤ log(1 + radius), so ‖h − I‖ ≤ radius and ‖h⁻¹ − I‖ ≤ radius.
fn ball_element<R: Rng + ?Sized>(d: usize, log_radius: f64, r: &mut R) -> Matrix {
    let m0 = Matrix::from_fn(d, d, |_, _| r.random_range(-1.0..1.0));
    let n0 = op_norm(&m0);
    if n0 == 0.0 {
        return Matrix::identity(d, d);
    }
    let s: f64 = r.random::<f64>().powf(1.0 / (d * d) as f64);
    expm(&(m0 * (log_radius * s / n0)))
}

/// ν^{(n)}: exact when m^n ≤ cap, otherwise a sampler of length-n words.
pub fn convolution_power(nu: &AtomicMatrixMeasure, n: usize, cap: usize) -> Result<Convolution> {
    if n == 0 {
        return Err(Error::InvalidArgument("convolution power needs n ≥ 1".into()));
    }
    let m = nu.len();
    let count = (m as f64).powi(n as i32);
    if count <= cap as f64 {
        let mut words: Vec<(f64, Matrix)> = nu.iter().map(|(p, a)| (p, a.clone())).collect();
        for _ in 1..n {
            let mut next = Vec::with_capacity(words.len() * m);
            for (w, g) in &words {
                for (p, a) in nu.iter() {
                    next.push((w * p, a * g));
                }
            }
            words = next;
        }
        let total: f64 = words.iter().map(|w| w.0).sum();
        for w in &mut words {
            w.0 /= total;
        }
        Ok(Convolution::Exact(AtomicMatrixMeasure::new(words)?))
    } else {
        let b = nu.support_norm_bound().powi(n as i32);
        Ok(Convolution::Sampled(MatrixSampler {
            base: nu.clone(),
            kind: Kind::Word { n },
            seed: rng::derive_seed(n as u64, domain::AUX),
            norm_bound: b,
        }))
    }
}

/// ν ∗ ξ with ξ uniform on a small ball around the identity.
pub fn smooth(nu: &AtomicMatrixMeasure, radius: f64, seed: u64) -> Result<MatrixSampler> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("smoothing radius {radius} must be positive")));
    }
    let s = MatrixSampler {
        base: nu.clone(),
        kind: Kind::Smooth { log_radius: radius.ln_1p() },
        seed,
        norm_bound: nu.support_norm_bound() * (1.0 + radius),
    };
    for i in 0..64 {
        check_invertible(&s.draw_at(i), INVERTIBILITY_TOL)
            .map_err(|e| Error::Sampler(format!("smoothed draw {i} is singular: {e}")))?;
    }
    Ok(s)
}
