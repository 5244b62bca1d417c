use crate::error::{Error, Result};
use crate::linalg::{op_norm, random::gaussian_vector, Matrix, SubspacePoint};
use crate::rng::{self, domain};
use serde::Serialize;

/// g = [[g^E, h], [0, g^⊥]] in an orthonormal basis adapted to E ⊕ E^⊥.
#[derive(Debug, Clone, Serialize)]
pub struct BlockDecomposition {
    #[serde(skip)]
    pub g_e: Matrix,
    #[serde(skip)]
    pub h: Matrix,
    #[serde(skip)]
    pub g_perp: Matrix,
    #[serde(skip)]
    pub basis: Matrix,
    pub residual: f64,
    pub reassembly_err: f64,
    pub perp_identity_err: f64,
}

pub fn block_decompose(g: &Matrix, e: &SubspacePoint) -> Result<BlockDecomposition> {
    let d = e.dim_ambient();
    if g.nrows() != d || g.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: g.nrows() });
    }
    let r = e.dim_sub();
    let comp = e.complement_frame();
    let mut basis = Matrix::zeros(d, d);
    basis.columns_mut(0, r).copy_from(e.frame());
    basis.columns_mut(r, d - r).copy_from(&comp);
    let adapted = basis.transpose() * g * &basis;
    let scale = op_norm(g);
    let residual = op_norm(&adapted.view((r, 0), (d - r, r)).into_owned()) / scale;
    if residual > 1e-8 {
        return Err(Error::NotInvariant { residual, tol: 1e-8 });
    }
    let g_e = adapted.view((0, 0), (r, r)).into_owned();
    let h = adapted.view((0, r), (r, d - r)).into_owned();
    let g_perp = adapted.view((r, r), (d - r, d - r)).into_owned();
    let mut clean = Matrix::zeros(d, d);
    clean.view_mut((0, 0), (r, r)).copy_from(&g_e);
    clean.view_mut((0, r), (r, d - r)).copy_from(&h);
    clean.view_mut((r, r), (d - r, d - r)).copy_from(&g_perp);
    let reassembly_err = op_norm(&(&basis * &clean * basis.transpose() - g)) / scale;
    // (g u)^⊥ = g^⊥ u^⊥ on random vectors.
    let mut rr = rng::stream(0xb10c, domain::AUX, d as u64);
    let mut perp_identity_err: f64 = 0.0;
    for _ in 0..10 {
        let u = gaussian_vector(d, &mut rr);
        let lhs = comp.transpose() * (g * &u);
        let rhs = &g_perp * (comp.transpose() * &u);
        perp_identity_err = perp_identity_err.max((lhs - rhs).norm() / (scale * u.norm()));
    }
    if perp_identity_err > 1e-9 || reassembly_err > 1e-10 {
        return Err(Error::Degenerate(format!(
            "block form check failed (perp {perp_identity_err:e}, reassembly {reassembly_err:e})"
        )));
    }
    debug_assert!(op_norm(&g_perp) <= scale * (1.0 + 1e-12));
    Ok(BlockDecomposition { g_e, h, g_perp, basis, residual, reassembly_err, perp_identity_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_diagonal_input() {
        let g = Matrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 5.0]);
        let b = block_decompose(&g, &SubspacePoint::coordinate(3, &[0, 1])).unwrap();
        assert_eq!(b.g_e, Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]));
        assert!(b.h.norm() < 1e-15);
        assert_eq!(b.g_perp, Matrix::from_row_slice(1, 1, &[5.0]));
    }

    #[test]
    fn non_invariant_rejected() {
        let g = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0]);
        assert!(block_decompose(&g, &SubspacePoint::coordinate(2, &[0])).is_err());
    }
}
