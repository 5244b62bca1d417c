use super::params::MargulisParams;
use crate::error::{Error, Result};
use crate::linalg::{projective_distance, subspace_distance, FlagPoint, Matrix, ProjectivePoint, SubspacePoint};
use serde::Serialize;

const COINCIDENT: f64 = f64::MIN_POSITIVE;
const GENERAL_POSITION: f64 = 1e-9;

/// d(x + x', E): the sup over the great circle through x, x' of the
/// distance to E.
pub fn vertical_angle_1(x: &ProjectivePoint, xp: &ProjectivePoint, e: &SubspacePoint) -> Result<f64> {
    if projective_distance(x, xp)? <= COINCIDENT {
        return Err(Error::Degenerate("x = x': the great circle is undefined".into()));
    }
    subspace_distance(&line_sum(x, xp)?, e)
}

/// span(x, x') built from x and the chord x' ∓ x, which stays accurate when
/// the lines are very close.
fn line_sum(x: &ProjectivePoint, xp: &ProjectivePoint) -> Result<SubspacePoint> {
    let (u, v) = (x.vector(), xp.vector());
    let chord = if u.dot(v) >= 0.0 { v - u } else { v + u };
    SubspacePoint::span_of(&Matrix::from_columns(&[u.clone(), chord]))
}

/// VA_1(x, x')·d(x, x')^γ_1.
pub fn vertical_projection_1(x: &ProjectivePoint, xp: &ProjectivePoint, e: &SubspacePoint, params: &MargulisParams) -> Result<f64> {
    Ok(vertical_angle_1(x, xp, e)? * projective_distance(x, xp)?.powf(params.gamma[0]))
}

fn check_pair(x: &FlagPoint, xp: &FlagPoint) -> Result<()> {
    if x.rank() != xp.rank() || x.dim_ambient() != xp.dim_ambient() {
        return Err(Error::DimensionMismatch { expected: x.rank(), got: xp.rank() });
    }
    Ok(())
}

fn line_off(xp: &FlagPoint, x: &FlagPoint) -> Result<()> {
    if subspace_distance(&xp.level(1), &x.top())? <= GENERAL_POSITION {
        return Err(Error::Degenerate("F'_1 ⊂ F_r: flags are not in general position".into()));
    }
    Ok(())
}

/// d(F'_1 + F_r, E). Not symmetric in (x, x') for r > 1.
pub fn vertical_angle_r(x: &FlagPoint, xp: &FlagPoint, e: &SubspacePoint) -> Result<f64> {
    check_pair(x, xp)?;
    if x.rank() == 1 {
        return vertical_angle_1(&x.line(), &xp.line(), e);
    }
    line_off(xp, x)?;
    subspace_distance(&xp.level(1).sum(&x.top())?, e)
}

/// d(F_r, F_{r−1} + F'_1), with F_0 = {0}.
fn transversal(x: &FlagPoint, xp: &FlagPoint) -> Result<f64> {
    let r = x.rank();
    if r == 1 {
        return projective_distance(&x.line(), &xp.line());
    }
    subspace_distance(&x.top(), &x.level(r - 1).sum(&xp.level(1))?)
}

/// VA_r(x, x')·d(F_r, F_{r−1} + F'_1)^γ_r.
pub fn vertical_projection_r(x: &FlagPoint, xp: &FlagPoint, e: &SubspacePoint, params: &MargulisParams) -> Result<f64> {
    let r = x.rank();
    Ok(vertical_angle_r(x, xp, e)? * transversal(x, xp)?.powf(params.gamma[r - 1]))
}

fn check_rank(x: &FlagPoint, params: &MargulisParams) -> Result<()> {
    if params.rank() != x.rank() {
        return Err(Error::DimensionMismatch { expected: params.rank(), got: x.rank() });
    }
    Ok(())
}

/// ψ_r(x, x') = ψ_{r−1}(x_−, x'_−)^{β_{r−1}}·VP_r(x, x').
pub fn psi_r(x: &FlagPoint, xp: &FlagPoint, e: &SubspacePoint, params: &MargulisParams) -> Result<f64> {
    check_rank(x, params)?;
    let vp = vertical_projection_r(x, xp, e, params)?;
    match (x.truncate(), xp.truncate(), params.truncated()) {
        (Some(xm), Some(xpm), Some(pm)) => Ok(psi_r(&xm, &xpm, e, &pm)?.powf(params.beta[params.rank() - 2]) * vp),
        _ => Ok(vp),
    }
}

fn general_position(x: &FlagPoint, xp: &FlagPoint) -> Result<()> {
    check_pair(x, xp)?;
    if x.rank() == 1 {
        if projective_distance(&x.line(), &xp.line())? <= COINCIDENT {
            return Err(Error::Degenerate("x = x'".into()));
        }
        return Ok(());
    }
    line_off(xp, x)?;
    line_off(x, xp)
}

/// max{ψ_r(x, x'), ψ_r(x', x)}.
pub fn psi_hat(x: &FlagPoint, xp: &FlagPoint, e: &SubspacePoint, params: &MargulisParams) -> Result<f64> {
    general_position(x, xp)?;
    Ok(psi_r(x, xp, e, params)?.max(psi_r(xp, x, e, params)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stabilized {
    pub sva: f64,
    pub svp: f64,
    pub psi: f64,
}

/// SVA_r = max{VA_r, ω_r e^{−Bn}}, SVP_r, and the stabilized ψ_r.
pub fn stabilized(x: &FlagPoint, xp: &FlagPoint, e: &SubspacePoint, params: &MargulisParams) -> Result<Stabilized> {
    check_rank(x, params)?;
    let r = x.rank();
    let sva = vertical_angle_r(x, xp, e)?.max(params.floor(r));
    let svp = sva * transversal(x, xp)?.powf(params.gamma[r - 1]);
    let psi = match (x.truncate(), xp.truncate(), params.truncated()) {
        (Some(xm), Some(xpm), Some(pm)) => stabilized(&xm, &xpm, e, &pm)?.psi.powf(params.beta[r - 2]) * svp,
        _ => svp,
    };
    Ok(Stabilized { sva, svp, psi })
}

/// log(Ω + ψ̂⁻¹) when F_r or F'_r is within eps_cut of E, log Ω otherwise,
/// with ψ̂ the symmetrized stabilized ψ_r.
pub fn cutoff_psi(x: &FlagPoint, xp: &FlagPoint, e: &SubspacePoint, params: &MargulisParams) -> Result<f64> {
    general_position(x, xp)?;
    let near = subspace_distance(&x.top(), e)? <= params.eps_cut || subspace_distance(&xp.top(), e)? <= params.eps_cut;
    if !near {
        return Ok(params.big_omega.ln());
    }
    let h = stabilized(x, xp, e, params)?.psi.max(stabilized(xp, x, e, params)?.psi);
    Ok((params.big_omega + 1.0 / h).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> ProjectivePoint {
        ProjectivePoint::from_slice(v).unwrap()
    }

    fn flag(cols: &[&[f64]]) -> FlagPoint {
        let d = cols[0].len();
        let m = Matrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
        FlagPoint::from_frame(&m).unwrap()
    }

    #[test]
    fn vertical_angle_examples() {
        let e12 = SubspacePoint::coordinate(3, &[0, 1]);
        assert!(vertical_angle_1(&p(&[1.0, 0.0, 0.0]), &p(&[0.0, 1.0, 0.0]), &e12).unwrap() < 1e-15);
        assert!((vertical_angle_1(&p(&[1.0, 0.0, 0.0]), &p(&[0.0, 0.0, 1.0]), &e12).unwrap() - 1.0).abs() < 1e-15);
        assert!(vertical_angle_1(&p(&[1.0, 0.0, 0.0]), &p(&[1.0, 0.0, 0.0]), &e12).is_err());
    }

    #[test]
    fn vertical_projection_45_degrees() {
        let e12 = SubspacePoint::coordinate(3, &[0, 1]);
        let mut params = MargulisParams::defaults(1, 0.1, 1, 1.0);
        params.gamma[0] = 1.0;
        let vp = vertical_projection_1(&p(&[1.0, 0.0, 0.0]), &p(&[1.0, 0.0, 1.0]), &e12, &params).unwrap();
        assert!((vp - 0.5f64.sqrt()).abs() < 1e-15);
    }

    fn example_12_6(eps: f64) -> (FlagPoint, FlagPoint) {
        let x = flag(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]);
        let xp = flag(&[&[1.0, 0.0, 0.0, eps], &[0.0, 1.0, 0.0, 0.0]]);
        (x, xp)
    }

    #[test]
    fn tilted_flag_keeps_vertical_projection() {
        let e = SubspacePoint::coordinate(4, &[0, 1, 2]);
        let params = MargulisParams::defaults(2, 0.1, 1, 1.0);
        for eps in [0.1, 0.01, 0.001] {
            let (x, xp) = example_12_6(eps);
            assert!((vertical_angle_r(&x, &xp, &e).unwrap() - 1.0).abs() < 1e-12);
            assert!((vertical_projection_r(&x, &xp, &e, &params).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_is_consistent() {
        let e = SubspacePoint::coordinate(3, &[0, 1]);
        let params = MargulisParams::defaults(1, 0.1, 1, 1.0);
        let (a, b) = (p(&[1.0, 0.2, 0.3]), p(&[0.1, 1.0, -0.4]));
        let (fa, fb) = (flag(&[a.vector().as_slice()]), flag(&[b.vector().as_slice()]));
        assert!((vertical_angle_r(&fa, &fb, &e).unwrap() - vertical_angle_1(&a, &b, &e).unwrap()).abs() < 1e-12);
        assert!((psi_r(&fa, &fb, &e, &params).unwrap() - vertical_projection_1(&a, &b, &e, &params).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn stabilization_cases() {
        let e = SubspacePoint::coordinate(3, &[0, 1]);
        let mut params = MargulisParams::defaults(1, 0.1, 0, 1.0);
        params.omega[0] = 0.1;
        let x = flag(&[&[1.0, 0.0, 0.0]]);
        let far = flag(&[&[0.0, 0.75f64.sqrt(), 0.5]]);
        assert!((stabilized(&x, &far, &e, &params).unwrap().sva - 0.5).abs() < 1e-12);
        let near = flag(&[&[0.0, 1.0, 0.01]]);
        assert!((stabilized(&x, &near, &e, &params).unwrap().sva - 0.1).abs() < 1e-15);
    }

    #[test]
    fn cutoff_branches() {
        let e = SubspacePoint::coordinate(3, &[0, 1]);
        let params = MargulisParams::defaults(1, 0.1, 1, 1.0);
        let far1 = flag(&[&[0.0, 0.0, 1.0]]);
        let far2 = flag(&[&[0.0, 1.0, 1.0]]);
        assert_eq!(cutoff_psi(&far1, &far2, &e, &params).unwrap(), params.big_omega.ln());
        let a = flag(&[&[1.0, 0.0, 0.0]]);
        let b = flag(&[&[0.0, 0.0, 1.0]]);
        // ψ̂ = 1 · 1^γ.
        assert!((cutoff_psi(&a, &b, &e, &params).unwrap() - (params.big_omega + 1.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn nearby_lines_keep_their_plane() {
        let e = SubspacePoint::coordinate(3, &[0, 1]);
        let (c, sn) = (0.8, 0.6);
        for delta in [1e-3, 1e-12, 1e-18] {
            let x = p(&[1.0, 0.0, 0.0]);
            let xp = p(&[1.0, delta * c, delta * sn]);
            assert!((vertical_angle_1(&x, &xp, &e).unwrap() - sn).abs() < 1e-9, "δ = {delta}");
        }
    }
}
