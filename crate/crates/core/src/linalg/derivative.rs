use super::{check_invertible, op_norm, Matrix, ProjectivePoint, SubspacePoint, Vector, INVERTIBILITY_TOL};
use crate::error::{Error, Result};

/// Dg_v v̇ = Π_{gv}(g v̇)·‖v‖/‖gv‖ for v̇ ⟂ v.
pub fn projective_derivative(g: &Matrix, v: &ProjectivePoint, vdot: &Vector) -> Result<Vector> {
    let d = v.dim();
    if g.nrows() != d || vdot.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: vdot.len().min(g.nrows()) });
    }
    check_invertible(g, INVERTIBILITY_TOL)?;
    let vv = v.vector();
    if vv.dot(vdot).abs() > 1e-10 * vdot.norm().max(1.0) {
        return Err(Error::InvalidArgument("tangent vector is not orthogonal to the base point".into()));
    }
    let gv = g * vv;
    let ngv = gv.norm();
    let u = &gv / ngv;
    let w = g * vdot;
    let proj = &w - &u * u.dot(&w);
    Ok(proj * (vv.norm() / ngv))
}

/// Dg_v^⊥ v^⊥ = g^⊥ v^⊥·‖v‖/‖gv‖ for g preserving E, v ∈ E and v^⊥ ∈ E^⊥.
pub fn vertical_derivative(
    g: &Matrix,
    e: &SubspacePoint,
    v: &Vector,
    vperp: &Vector,
    tol: f64,
) -> Result<Vector> {
    let d = e.dim_ambient();
    if g.nrows() != d || v.len() != d || vperp.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.len() });
    }
    check_invertible(g, INVERTIBILITY_TOL)?;
    let f = e.frame();
    let ge = g * f;
    let leak = &ge - f * (f.transpose() * &ge);
    let residual = op_norm(&leak);
    if residual > tol * op_norm(g).max(1.0) {
        return Err(Error::NotInvariant { residual, tol });
    }
    if !e.contains(v, 1e-9) || v.norm() == 0.0 {
        return Err(Error::InvalidArgument("base vector is not a nonzero element of E".into()));
    }
    if (f.transpose() * vperp).norm() > 1e-9 * vperp.norm().max(1.0) {
        return Err(Error::InvalidArgument("transversal vector is not in the orthogonal complement".into()));
    }
    let w = g * vperp;
    let wperp = &w - f * (f.transpose() * &w);
    Ok(wperp * (v.norm() / (g * v).norm()))
}
