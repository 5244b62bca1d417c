use crate::error::{Error, Result};
use crate::linalg::{check_invertible, from_row_major, op_norm, to_row_major, Matrix, INVERTIBILITY_TOL};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::borrow::Cow;
use std::path::Path;

/// Anything the Monte Carlo engines can draw i.i.d. matrices from.
pub trait MatrixLaw: Sync {
    fn dim(&self) -> usize;
    fn draw<'a, R: Rng + ?Sized>(&'a self, rng: &mut R) -> Cow<'a, Matrix>;
}

/// ν = Σ p_i δ_{A_i} with p_i > 0, Σ p_i = 1 and every A_i invertible.
#[derive(Debug, Clone)]
pub struct AtomicMatrixMeasure {
    dim: usize,
    weights: Vec<f64>,
    atoms: Vec<Matrix>,
    index: WeightedIndex<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomFile {
    p: f64,
    #[serde(rename = "A")]
    a: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    dim: usize,
    atoms: Vec<AtomFile>,
}

impl AtomicMatrixMeasure {
    pub fn new(atoms: Vec<(f64, Matrix)>) -> Result<Self> {
        Self::with_tolerance(atoms, INVERTIBILITY_TOL)
    }

    pub fn with_tolerance(atoms: Vec<(f64, Matrix)>, invertibility_tol: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let dim = atoms[0].1.nrows();
        if dim < 1 {
            return Err(Error::InvalidMeasure("dimension must be positive".into()));
        }
        let mut total = 0.0;
        for (i, (p, a)) in atoms.iter().enumerate() {
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom {i}: weight {p} is not positive")));
            }
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::InvalidMeasure(format!(
                    "atom {i}: shape {}x{} but dim is {dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            check_invertible(a, invertibility_tol)
                .map_err(|e| Error::InvalidMeasure(format!("atom {i}: {e}")))?;
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        let (weights, atoms): (Vec<f64>, Vec<Matrix>) = atoms.into_iter().unzip();
        let index = WeightedIndex::new(&weights).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
        Ok(Self { dim, weights, atoms, index })
    }

    /// δ_A.
    pub fn dirac(a: Matrix) -> Result<Self> {
        Self::new(vec![(1.0, a)])
    }

    /// Equal weights on the given matrices.
    pub fn uniform(atoms: Vec<Matrix>) -> Result<Self> {
        let p = 1.0 / atoms.len() as f64;
        Self::new(atoms.into_iter().map(|a| (p, a)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> &[Matrix] {
        &self.atoms
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &Matrix)> {
        self.weights.iter().cloned().zip(self.atoms.iter())
    }

    /// Index of an atom drawn according to the weights.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.atoms.len() == 1 {
            0
        } else {
            self.index.sample(rng)
        }
    }

    /// Σ p_i log|det A_i|, the sum of all Lyapunov exponents.
    pub fn mean_log_det(&self) -> f64 {
        self.iter().map(|(p, a)| p * a.determinant().abs().ln()).sum()
    }

    /// sup over atoms of max(‖A_i‖, ‖A_i⁻¹‖).
    pub fn support_norm_bound(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| {
                let inv = a.clone().try_inverse().map(|b| op_norm(&b)).unwrap_or(f64::INFINITY);
                op_norm(a).max(inv)
            })
            .fold(0.0, f64::max)
    }

    /// Apply `f` to every atom, keeping the weights.
    pub fn map_atoms<F: Fn(&Matrix) -> Matrix>(&self, f: F) -> Result<Self> {
        Self::new(self.iter().map(|(p, a)| (p, f(a))).collect())
    }

    /// The transposed measure (atoms A_iᵀ).
    pub fn transpose(&self) -> Self {
        self.map_atoms(|a| a.transpose()).expect("transpose preserves validity")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MeasureFile = serde_json::from_str(s)?;
        let mut atoms = Vec::with_capacity(file.atoms.len());
        for (i, a) in file.atoms.into_iter().enumerate() {
            let m = from_row_major(file.dim, &a.a)
                .map_err(|e| Error::InvalidMeasure(format!("atom {i}: {e}")))?;
            atoms.push((a.p, m));
        }
        Self::new(atoms)
    }

    pub fn to_json_string(&self) -> String {
        let file = MeasureFile {
            dim: self.dim,
            atoms: self.iter().map(|(p, a)| AtomFile { p, a: to_row_major(a) }).collect(),
        };
        serde_json::to_string_pretty(&file).expect("measure serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

impl MatrixLaw for AtomicMatrixMeasure {
    fn dim(&self) -> usize {
        AtomicMatrixMeasure::dim(self)
    }

    fn draw<'a, R: Rng + ?Sized>(&'a self, rng: &mut R) -> Cow<'a, Matrix> {
        Cow::Borrowed(&self.atoms[self.sample_index(rng)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_reports_first_violation() {
        let i2 = Matrix::identity(2, 2);
        assert!(AtomicMatrixMeasure::new(vec![(0.5, i2.clone()), (0.4, i2.clone())]).is_err());
        assert!(AtomicMatrixMeasure::new(vec![(-0.5, i2.clone()), (1.5, i2.clone())]).is_err());
        let sing = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let e = AtomicMatrixMeasure::new(vec![(0.5, i2.clone()), (0.5, sing)]).unwrap_err();
        assert!(e.to_string().contains("atom 1"));
    }

    #[test]
    fn json_roundtrip() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 0.5]);
        let nu = AtomicMatrixMeasure::new(vec![(0.25, a.clone()), (0.75, Matrix::identity(2, 2))]).unwrap();
        let back = AtomicMatrixMeasure::from_json_str(&nu.to_json_string()).unwrap();
        assert_eq!(back.atoms()[0], a);
        assert_eq!(back.weights(), nu.weights());
        let bad = r#"{"dim": 2, "atoms": [{"p": 1.0, "A": [1, 0, 0]}]}"#;
        assert!(AtomicMatrixMeasure::from_json_str(bad).is_err());
    }
}
