use super::atomic::AtomicMatrixMeasure;
use crate::linalg::{op_norm, random::haar_frame, subspace_distance, SubspacePoint};
use crate::rng::{self, domain};
use serde::Serialize;

/// Support constants: `a` bounds |log d(gU, gV) − log d(U, V)| and `b` is the
/// log condition bound plus 2.
///
/// `a` is the analytic bound 2·max log(‖g‖‖g⁻¹‖); `a_sampled` is the largest
/// distortion seen on random subspace pairs and never exceeds it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportConstants {
    #[serde(rename = "A")]
    pub a: f64,
    pub a_sampled: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub pairs_sampled: usize,
}

const PAIRS: usize = 1000;
const PAIR_SEED: u64 = 0x5ca1_ab1e;

/// Support constants of ν over a neighborhood of relative size `margin`
/// (matrices A·h with ‖h‖ ≤ 1 + margin and ‖h⁻¹‖ ≤ 1/(1 − margin)).
///
/// Sampled pairs are r-dimensional subspaces for every 1 ≤ r < d, drawn
/// from a stream that depends only on d.
pub fn support_constants(nu: &AtomicMatrixMeasure, margin: f64) -> SupportConstants {
    let margin = margin.clamp(0.0, 0.5);
    let slack = ((1.0 + margin) / (1.0 - margin)).ln();
    let log_cond = nu
        .atoms()
        .iter()
        .map(|g| {
            let inv = g.clone().try_inverse().expect("atoms are invertible");
            op_norm(g).ln() + op_norm(&inv).ln()
        })
        .fold(f64::NEG_INFINITY, f64::max)
        + slack;
    let b = log_cond + 2.0;
    let d = nu.dim();
    let mut a: f64 = 0.0;
    let mut sampled = 0;
    for r in 1..d.max(2) {
        if r >= d {
            break;
        }
        let mut stream = rng::stream(PAIR_SEED, domain::PAIRS, (d * 16 + r) as u64);
        for _ in 0..PAIRS {
            let u = SubspacePoint::from_orthonormal(haar_frame(d, r, &mut stream));
            let v = SubspacePoint::from_orthonormal(haar_frame(d, r, &mut stream));
            let d0 = subspace_distance(&u, &v).unwrap();
            if d0 < 1e-12 {
                continue;
            }
            sampled += 1;
            for g in nu.atoms() {
                let (Ok(gu), Ok(gv)) = (u.act(g), v.act(g)) else { continue };
                let d1 = subspace_distance(&gu, &gv).unwrap();
                if d1 > 0.0 {
                    a = a.max((d1.ln() - d0.ln()).abs());
                }
            }
        }
    }
    SupportConstants { a: (2.0 * log_cond).max(a), a_sampled: a, b, pairs_sampled: sampled }
}
