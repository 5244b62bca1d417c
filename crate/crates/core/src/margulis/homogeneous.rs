use crate::error::{Error, Result};
use crate::linalg::{random::haar_orthogonal, subspace_distance, FlagPoint, Matrix, SubspacePoint};
use crate::rng::{self, domain, StreamRng};
use rand::Rng;
use serde::{Deserialize, Serialize};

const MIN_ACCEPTANCE: f64 = 1e-4;
const MAX_ATTEMPTS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct HomogeneousSample {
    pub flag: FlagPoint,
    /// Proposals drawn until acceptance.
    pub attempts: usize,
}

/// A uniformly random flag (G_1, …, G_{r−1}, F_r) inside F_r; in restricted
/// mode conditioned on d(G_1, E) ≥ ½ d(F_r, E).
pub fn sample_homogeneous_flag_with(f_r: &SubspacePoint, restricted: bool, e: &SubspacePoint, rng: &mut StreamRng) -> Result<HomogeneousSample> {
    let r = f_r.dim_sub();
    if r == 1 {
        return Ok(HomogeneousSample { flag: FlagPoint::with_top(f_r, &Matrix::identity(1, 1))?, attempts: 1 });
    }
    let threshold = if restricted {
        let d = subspace_distance(f_r, e)?;
        if d <= 0.0 {
            return Err(Error::InvalidArgument("restricted sampling needs d(F_r, E) > 0".into()));
        }
        0.5 * d
    } else {
        0.0
    };
    for attempts in 1..=MAX_ATTEMPTS {
        let flag = FlagPoint::with_top(f_r, &haar_orthogonal(r, rng))?;
        if !restricted || subspace_distance(&flag.level(1), e)? >= threshold {
            return Ok(HomogeneousSample { flag, attempts });
        }
    }
    Err(Error::Sampler(format!(
        "restricted acceptance below {MIN_ACCEPTANCE:e}: no flag accepted in {MAX_ATTEMPTS} proposals (d(F_r, E) = {:e})",
        2.0 * threshold
    )))
}

pub fn sample_homogeneous_flag(f_r: &SubspacePoint, restricted: bool, e: &SubspacePoint, seed: u64) -> Result<HomogeneousSample> {
    sample_homogeneous_flag_with(f_r, restricted, e, &mut rng::stream(seed, domain::FLAGS, 0))
}

/// Resampling probability τ(F_r, F'_r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TauProfile {
    Constant { value: f64 },
    /// 0 below `zero_below`, 1 above `one_above`, linear in between, as a
    /// function of the larger of d(F_r, E), d(F'_r, E).
    Trapezoid { zero_below: f64, one_above: f64 },
}

impl TauProfile {
    pub fn value(&self, x: &FlagPoint, xp: &FlagPoint, e: &SubspacePoint) -> Result<f64> {
        match *self {
            TauProfile::Constant { value } => Ok(value),
            TauProfile::Trapezoid { zero_below, one_above } => {
                let s = subspace_distance(&x.top(), e)?.max(subspace_distance(&xp.top(), e)?);
                Ok(if s <= zero_below {
                    0.0
                } else if s >= one_above {
                    1.0
                } else {
                    (s - zero_below) / (one_above - zero_below)
                })
            }
        }
    }
}

/// One draw of the spreading-out kernel: with probability τ both sub-flags
/// are replaced by independent restricted homogeneous samples. F_r and F'_r
/// are never changed. Returns the pair and whether it was resampled.
pub fn spreading_out(
    x: &FlagPoint,
    xp: &FlagPoint,
    e: &SubspacePoint,
    tau: f64,
    rng: &mut StreamRng,
) -> Result<(FlagPoint, FlagPoint, bool)> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(format!("τ must lie in [0, 1], got {tau}")));
    }
    if tau == 0.0 || rng.random::<f64>() >= tau {
        return Ok((x.clone(), xp.clone(), false));
    }
    let a = sample_homogeneous_flag_with(&x.top(), true, e, rng)?.flag;
    let b = sample_homogeneous_flag_with(&xp.top(), true, e, rng)?.flag;
    Ok((a, b, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tilted_plane(d: f64) -> SubspacePoint {
        let m = Matrix::from_column_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, (1.0 - d * d).sqrt(), 0.0, d]);
        SubspacePoint::from_columns(&m).unwrap()
    }

    #[test]
    fn rank_one_is_the_point() {
        let e = SubspacePoint::coordinate(3, &[0, 1]);
        let f = SubspacePoint::coordinate(3, &[2]);
        let s = sample_homogeneous_flag(&f, true, &e, 3).unwrap();
        assert_eq!(s.flag.top(), f);
    }

    #[test]
    fn restricted_condition_holds() {
        let e = SubspacePoint::coordinate(4, &[0, 1, 2]);
        let f = tilted_plane(0.1);
        let mut rng = rng::stream(9, domain::FLAGS, 0);
        for _ in 0..200 {
            let s = sample_homogeneous_flag_with(&f, true, &e, &mut rng).unwrap();
            assert!(subspace_distance(&s.flag.level(1), &e).unwrap() >= 0.05);
            assert_eq!(s.flag.top(), f);
        }
    }

    #[test]
    fn tau_extremes() {
        let e = SubspacePoint::coordinate(4, &[0, 1, 2]);
        let x = FlagPoint::with_top(&tilted_plane(0.1), &Matrix::identity(2, 2)).unwrap();
        let xp = FlagPoint::with_top(&tilted_plane(0.2), &Matrix::identity(2, 2)).unwrap();
        let mut rng = rng::stream(1, domain::FLAGS, 0);
        let (a, b, moved) = spreading_out(&x, &xp, &e, 0.0, &mut rng).unwrap();
        assert!(!moved && a == x && b == xp);
        let (a, b, moved) = spreading_out(&x, &xp, &e, 1.0, &mut rng).unwrap();
        assert!(moved && a.top() == x.top() && b.top() == xp.top());
    }

    #[test]
    fn trapezoid_profile() {
        let e = SubspacePoint::coordinate(4, &[0, 1, 2]);
        let tau = TauProfile::Trapezoid { zero_below: 0.1, one_above: 0.3 };
        let f = |d: f64| FlagPoint::with_top(&tilted_plane(d), &Matrix::identity(2, 2)).unwrap();
        assert_eq!(tau.value(&f(0.05), &f(0.01), &e).unwrap(), 0.0);
        assert!((tau.value(&f(0.2), &f(0.01), &e).unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(tau.value(&f(0.01), &f(0.5), &e).unwrap(), 1.0);
    }
}
