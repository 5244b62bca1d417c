use crate::error::{Error, Result};
use crate::linalg::{subspace_distance, SubspacePoint};
use crate::measures::AtomicMatrixMeasure;
use serde::Serialize;

/// Closed ε-neighborhood E_r(ε) of the r-subspaces contained in E.
#[derive(Debug, Clone)]
pub struct Neighborhood {
    pub e: SubspacePoint,
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoreClass {
    CoreSharp,
    Core,
    Border,
    Outside,
}

impl Neighborhood {
    pub fn new(e: SubspacePoint, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidArgument(format!("radius must lie in (0, 1], got {eps}")));
        }
        Ok(Self { e, eps })
    }

    /// Radius of X_t, t ∈ [0, 2].
    pub fn radius(&self, t: f64) -> f64 {
        (1.0 - t / 100.0) * self.eps
    }

    pub fn contains(&self, p: &SubspacePoint, t: f64) -> Result<bool> {
        Ok(subspace_distance(p, &self.e)? <= self.radius(t))
    }
}

fn in_core(atoms: &[nalgebra::DMatrix<f64>], x: &Neighborhood, p: &SubspacePoint) -> Result<bool> {
    if !x.contains(p, 2.0)? {
        return Ok(false);
    }
    for a in atoms {
        if !x.contains(&p.act(a)?, 2.0)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Position of `point` relative to the ν-core of X and its sharp part.
pub fn core_border(nu: &AtomicMatrixMeasure, x: &Neighborhood, point: &SubspacePoint) -> Result<CoreClass> {
    if point.dim_ambient() != nu.dim() || x.e.dim_ambient() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: nu.dim(), got: point.dim_ambient() });
    }
    if !x.contains(point, 0.0)? {
        return Ok(CoreClass::Outside);
    }
    if !in_core(nu.atoms(), x, point)? {
        return Ok(CoreClass::Border);
    }
    for a in nu.atoms() {
        let inv = a.clone().try_inverse().ok_or(Error::Singular { det: 0.0, threshold: 0.0 })?;
        if !in_core(nu.atoms(), x, &point.act(&inv)?)? {
            return Ok(CoreClass::Core);
        }
    }
    Ok(CoreClass::CoreSharp)
}
