use crate::error::{Error, Result};
use crate::linalg::{op_norm, random::gaussian_vector, subspace_distance, Matrix, SubspacePoint};
use crate::lyapunov::{top_exponent, McConfig, TopExponent};
use crate::measures::AtomicMatrixMeasure;
use crate::rng::{self, domain};
use nalgebra::Complex;
use serde::Serialize;

const SEARCH_SEED: u64 = 0x1a7_71ce;
const RESIDUAL_TOL: f64 = 1e-8;

/// max_i ‖(I − P_L) A_i P_L‖ / ‖A_i‖.
pub fn invariant_residual(atoms: &[Matrix], l: &SubspacePoint) -> f64 {
    let f = l.frame();
    atoms
        .iter()
        .map(|a| {
            let af = a * f;
            let leak = &af - f * (f.transpose() * &af);
            op_norm(&leak) / op_norm(a)
        })
        .fold(0.0, f64::max)
}

/// Orthonormal basis of the numerical null space: right singular vectors
/// whose singular value is below `tol·‖m‖`, or exactly `force` of them.
fn null_space(m: &Matrix, tol: f64, force: Option<usize>) -> Matrix {
    let d = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let scale = svd.singular_values.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let k = match force {
        Some(k) => k,
        None => idx.iter().filter(|&&i| svd.singular_values[i] <= tol * scale).count(),
    };
    let mut out = Matrix::zeros(d, k);
    for (j, &i) in idx.iter().take(k).enumerate() {
        out.set_column(j, &vt.row(i).transpose());
    }
    out
}

/// Nested kernels ker p(M) ⊂ ker p(M)² ⊂ … for one eigenvalue cluster.
struct Block {
    chain: Vec<Matrix>,
}

fn eigen_blocks(m: &Matrix) -> Vec<Block> {
    let d = m.nrows();
    let eig: Vec<Complex<f64>> = m.complex_eigenvalues().iter().cloned().collect();
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut clusters: Vec<(Complex<f64>, usize)> = Vec::new();
    for z in eig {
        if z.im < -1e-9 * scale {
            continue;
        }
        let z = if z.im.abs() <= 1e-9 * scale { Complex::new(z.re, 0.0) } else { z };
        match clusters.iter_mut().find(|(c, _)| (*c - z).norm() <= 1e-6 * scale) {
            Some(c) => c.1 += 1,
            None => clusters.push((z, 1)),
        }
    }
    let id = Matrix::identity(d, d);
    clusters
        .into_iter()
        .map(|(z, mult)| {
            let shifted = m - &id * z.re;
            let (p, degree) = if z.im == 0.0 { (shifted, 1) } else { (&shifted * &shifted + &id * (z.im * z.im), 2) };
            let mut chain = Vec::with_capacity(mult);
            let mut power = id.clone();
            for j in 1..=mult {
                power = &p * &power;
                let force = (j == mult).then_some(degree * mult);
                let k = null_space(&power, 1e-7, force);
                if k.ncols() > 0 && chain.last().map(|c: &Matrix| c.ncols() < k.ncols()).unwrap_or(true) {
                    chain.push(k);
                }
            }
            Block { chain }
        })
        .collect()
}

fn intersect(u: &Matrix, w: &Matrix) -> Matrix {
    let c = u.transpose() * w;
    let svd = c.svd(true, false);
    let uu = svd.u.expect("requested U");
    let cols: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1.0 - 1e-9).collect();
    let mut out = Matrix::zeros(u.nrows(), cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &(u * uu.column(i)));
    }
    out
}

fn random_element(nu: &AtomicMatrixMeasure, draw: u64) -> Matrix {
    let mut r = rng::stream(SEARCH_SEED, domain::SEARCH, draw);
    let c = gaussian_vector(nu.len(), &mut r);
    let d = nu.dim();
    let mut m = Matrix::zeros(d, d);
    for (i, a) in nu.atoms().iter().enumerate() {
        m += a * (c[i] / op_norm(a));
    }
    m
}

fn candidate_pieces(nu: &AtomicMatrixMeasure, primary: u64, secondary: u64) -> Vec<Block> {
    let m1 = random_element(nu, primary);
    let m2 = random_element(nu, secondary);
    let refine = eigen_blocks(&m2);
    let mut out = Vec::new();
    for b in eigen_blocks(&m1) {
        let top = b.chain.last().cloned().unwrap_or_else(|| Matrix::zeros(nu.dim(), 0));
        let first_dim = b.chain.first().map(|c| c.ncols()).unwrap_or(0);
        let derogatory = b.chain.len() == 1 && first_dim > 2;
        if derogatory {
            let mut split = Vec::new();
            for rb in &refine {
                if let Some(rt) = rb.chain.last() {
                    let x = intersect(&top, rt);
                    if x.ncols() > 0 {
                        split.push(Block { chain: vec![x] });
                    }
                }
            }
            if split.iter().map(|s| s.chain[0].ncols()).sum::<usize>() == top.ncols() && split.len() > 1 {
                out.extend(split);
                continue;
            }
        }
        out.push(b);
    }
    out
}

fn enumerate(blocks: &[Block], r: usize, at: usize, chosen: &mut Vec<Matrix>, dim: usize, out: &mut Vec<Matrix>) {
    if dim == r {
        if !chosen.is_empty() {
            let d = chosen[0].nrows();
            let total: usize = chosen.iter().map(|c| c.ncols()).sum();
            let mut m = Matrix::zeros(d, total);
            let mut j = 0;
            for c in chosen.iter() {
                for k in 0..c.ncols() {
                    m.set_column(j, &c.column(k));
                    j += 1;
                }
            }
            out.push(m);
        }
        return;
    }
    if at == blocks.len() {
        return;
    }
    enumerate(blocks, r, at + 1, chosen, dim, out);
    for piece in &blocks[at].chain {
        if dim + piece.ncols() <= r {
            chosen.push(piece.clone());
            enumerate(blocks, r, at + 1, chosen, dim + piece.ncols(), out);
            chosen.pop();
        }
    }
}

/// r-dimensional subspaces invariant under every atom of ν.
///
/// Candidates are sums of generalized eigenspace pieces of two random
/// elements of the algebra spanned by the atoms, and each is verified
/// against every atom, so there are no false positives. Degenerate inputs
/// with continuous families of invariant subspaces are not enumerated.
pub fn invariant_subspace_search(nu: &AtomicMatrixMeasure, r: usize) -> Vec<SubspacePoint> {
    let d = nu.dim();
    if r == 0 || r >= d {
        return Vec::new();
    }
    let mut found: Vec<SubspacePoint> = Vec::new();
    for (p, s) in [(0u64, 1u64), (1, 0)] {
        let blocks = candidate_pieces(nu, p, s);
        let mut cands = Vec::new();
        enumerate(&blocks, r, 0, &mut Vec::new(), 0, &mut cands);
        for c in cands {
            let Ok(l) = SubspacePoint::from_columns(&c) else { continue };
            if l.dim_sub() != r || invariant_residual(nu.atoms(), &l) > RESIDUAL_TOL {
                continue;
            }
            if !found.iter().any(|f| f.approx_eq(&l, 1e-9)) {
                found.push(l);
            }
        }
    }
    found
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateRow {
    pub dim: usize,
    pub lambda_restricted: f64,
    pub half_width: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquatorReport {
    #[serde(skip)]
    pub subspace: SubspacePoint,
    pub dim: usize,
    pub frame: Vec<Vec<f64>>,
    pub lambda_restricted: f64,
    pub lambda_restricted_half_width: f64,
    pub lambda_full: f64,
    pub lambda_full_half_width: f64,
    /// Invariant subspaces strictly containing the equator whose restricted
    /// exponent is not below λ_1.
    pub maximality_witnesses: Vec<CandidateRow>,
    pub ambiguous: bool,
    #[serde(skip)]
    pub alternatives: Vec<SubspacePoint>,
    pub candidates: Vec<CandidateRow>,
}

/// Restriction of ν to an invariant subspace, in its orthonormal frame.
pub fn restricted_measure(nu: &AtomicMatrixMeasure, l: &SubspacePoint) -> Result<AtomicMatrixMeasure> {
    let f = l.frame();
    AtomicMatrixMeasure::new(nu.iter().map(|(p, a)| (p, f.transpose() * a * f)).collect())
}

/// The maximal invariant subspace with restricted top exponent below λ_1(ν).
pub fn equator_detect(nu: &AtomicMatrixMeasure, budget: &McConfig) -> Result<Option<EquatorReport>> {
    let d = nu.dim();
    if d > 6 {
        return Err(Error::InvalidArgument(format!("equator search supports d ≤ 6, got {d}")));
    }
    let full = top_exponent(nu, budget)?;
    let mut rows: Vec<(SubspacePoint, TopExponent, bool)> = Vec::new();
    for r in 1..d {
        for l in invariant_subspace_search(nu, r) {
            let t = top_exponent(&restricted_measure(nu, &l)?, budget)?;
            let passes = t.estimate < full.estimate - (t.half_width + full.half_width + 1e-6);
            rows.push((l, t, passes));
        }
    }
    let row = |l: &SubspacePoint, t: &TopExponent, p: bool| CandidateRow {
        dim: l.dim_sub(),
        lambda_restricted: t.estimate,
        half_width: t.half_width,
        passes: p,
    };
    let contained = |a: &SubspacePoint, b: &SubspacePoint| {
        a.dim_sub() < b.dim_sub() && subspace_distance(a, b).map(|x| x < 1e-9).unwrap_or(false)
    };
    let passing: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].2).collect();
    let maximal: Vec<usize> = passing
        .iter()
        .cloned()
        .filter(|&i| !passing.iter().any(|&j| contained(&rows[i].0, &rows[j].0)))
        .collect();
    let Some(&best) = maximal.iter().max_by_key(|&&i| rows[i].0.dim_sub()) else {
        return Ok(None);
    };
    let (e, t, _) = &rows[best];
    let witnesses = rows
        .iter()
        .filter(|(l, _, p)| !p && contained(e, l))
        .map(|(l, t, p)| row(l, t, *p))
        .collect();
    Ok(Some(EquatorReport {
        subspace: e.clone(),
        dim: e.dim_sub(),
        frame: (0..e.dim_sub()).map(|j| e.frame().column(j).iter().cloned().collect()).collect(),
        lambda_restricted: t.estimate,
        lambda_restricted_half_width: t.half_width,
        lambda_full: full.estimate,
        lambda_full_half_width: full.half_width,
        maximality_witnesses: witnesses,
        ambiguous: maximal.len() > 1,
        alternatives: maximal.iter().filter(|&&i| i != best).map(|&i| rows[i].0.clone()).collect(),
        candidates: rows.iter().map(|(l, t, p)| row(l, t, *p)).collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_upper_triangular_eigenvector() {
        let a = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let b = Matrix::from_row_slice(2, 2, &[1.0, 3.0, 0.0, 3.0]);
        let nu = AtomicMatrixMeasure::uniform(vec![a, b]).unwrap();
        let found = invariant_subspace_search(&nu, 1);
        assert_eq!(found.len(), 1);
        assert!(found[0].approx_eq(&SubspacePoint::coordinate(2, &[0]), 1e-9));
    }

    #[test]
    fn jordan_block_pair() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let b = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        let nu = AtomicMatrixMeasure::uniform(vec![a, b]).unwrap();
        let found = invariant_subspace_search(&nu, 1);
        assert_eq!(found.len(), 1);
        assert!(found[0].approx_eq(&SubspacePoint::coordinate(2, &[0]), 1e-9));
    }

    #[test]
    fn diagonal_dirac_equator() {
        let nu = AtomicMatrixMeasure::dirac(Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5])).unwrap();
        let rep = equator_detect(&nu, &McConfig::new(2000, 8, 1)).unwrap().unwrap();
        assert!(rep.subspace.approx_eq(&SubspacePoint::coordinate(2, &[1]), 1e-9));
        assert!((rep.lambda_restricted + 2f64.ln()).abs() < 1e-12);
        assert!(!rep.ambiguous);
    }
}
