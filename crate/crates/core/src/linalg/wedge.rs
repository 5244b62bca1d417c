use super::Matrix;
use crate::error::{Error, Result};
use itertools::Itertools;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: usize = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Lexicographically ordered l-subsets of {0, …, d−1}: the wedge basis.
pub fn wedge_indices(d: usize, l: usize) -> Vec<Vec<usize>> {
    (0..d).combinations(l).collect()
}

fn minor(g: &Matrix, rows: &[usize], cols: &[usize]) -> f64 {
    let l = rows.len();
    match l {
        1 => g[(rows[0], cols[0])],
        2 => g[(rows[0], cols[0])] * g[(rows[1], cols[1])] - g[(rows[0], cols[1])] * g[(rows[1], cols[0])],
        _ => Matrix::from_fn(l, l, |i, j| g[(rows[i], cols[j])]).determinant(),
    }
}

/// Λ^l g in the basis e_{j_1} ∧ … ∧ e_{j_l}, j_1 < … < j_l, lexicographic.
pub fn exterior_power(g: &Matrix, l: usize) -> Result<Matrix> {
    let d = g.nrows();
    if g.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: g.ncols() });
    }
    if l == 0 || l > d {
        return Err(Error::InvalidArgument(format!("wedge degree {l} outside 1..={d}")));
    }
    let idx = wedge_indices(d, l);
    let n = idx.len();
    Ok(Matrix::from_fn(n, n, |a, b| minor(g, &idx[a], &idx[b])))
}
