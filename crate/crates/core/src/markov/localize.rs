use super::kernel::{mass, FiniteMarkovKernel};
use crate::error::{Error, Result};
use crate::stats::CompensatedSum;
use serde::Serialize;

pub const STATIONARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct LocalizedKernel {
    pub kernel: FiniteMarkovKernel,
    /// Original state indices, in the order used by `kernel`.
    pub states: Vec<usize>,
    pub eta_u: Vec<f64>,
    /// ∫_U σ_x(U^c) dη(x).
    pub j_left: f64,
    /// ∫_{U^c} σ_x(U) dη(x).
    pub j_right: f64,
    pub stationarity_residual: f64,
}

/// Induced operator on U: a step that leaves U is replaced by a re-entry
/// drawn from the η-average of the laws σ_z|U over z ∉ U.
pub fn localize_kernel(t: &FiniteMarkovKernel, eta: &[f64], u: &[usize]) -> Result<LocalizedKernel> {
    let n = t.n_states();
    if eta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: eta.len() });
    }
    let mut in_u = vec![false; n];
    for &x in u {
        if x >= n || in_u[x] {
            return Err(Error::InvalidArgument(format!("state subset has invalid or repeated index {x}")));
        }
        in_u[x] = true;
    }
    let mut states: Vec<usize> = u.to_vec();
    states.sort_unstable();
    let outside: Vec<usize> = (0..n).filter(|&x| !in_u[x]).collect();
    let res = t.stationarity_residual(eta);
    if res > STATIONARITY_TOL {
        return Err(Error::InvalidMeasure(format!("η is not stationary (‖ηT − η‖₁ = {res:e})")));
    }
    let eta_mass = mass(eta, states.iter().cloned());
    if eta_mass <= 0.0 {
        return Err(Error::InvalidMeasure("η(U) = 0".into()));
    }
    let leak: Vec<f64> = (0..n).map(|x| mass(t.row(x), outside.iter().cloned())).collect();
    let mut jl = CompensatedSum::new();
    states.iter().for_each(|&x| jl.add(eta[x] * leak[x]));
    let mut jr = CompensatedSum::new();
    outside.iter().for_each(|&z| jr.add(eta[z] * mass(t.row(z), states.iter().cloned())));
    let (j_left, j_right) = (jl.value(), jr.value());

    let reentry: Option<Vec<f64>> = (j_right > 0.0).then(|| {
        states
            .iter()
            .map(|&y| {
                let mut s = CompensatedSum::new();
                outside.iter().for_each(|&z| s.add(eta[z] * t.row(z)[y]));
                s.value() / j_right
            })
            .collect()
    });
    let rows: Vec<Vec<f64>> = states
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut row: Vec<f64> = states.iter().map(|&y| t.row(x)[y]).collect();
            match &reentry {
                Some(r) => row.iter_mut().zip(r).for_each(|(v, q)| *v += leak[x] * q),
                None => {}
            }
            let s = mass(&row, 0..row.len());
            if s > 0.0 {
                row.iter_mut().for_each(|v| *v /= s);
            } else {
                // η-null state that leaves U at once and nobody re-enters.
                row[i] = 1.0;
            }
            row
        })
        .collect();
    let kernel = FiniteMarkovKernel::new(rows)?;
    let eta_u: Vec<f64> = states.iter().map(|&x| eta[x] / eta_mass).collect();
    let stationarity_residual = kernel.stationarity_residual(&eta_u);
    Ok(LocalizedKernel { kernel, states, eta_u, j_left, j_right, stationarity_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_state() -> FiniteMarkovKernel {
        FiniteMarkovKernel::new(vec![vec![0.5, 0.5, 0.0], vec![0.25, 0.5, 0.25], vec![0.0, 0.5, 0.5]]).unwrap()
    }

    #[test]
    fn hand_evaluated_three_state() {
        let t = three_state();
        let l = localize_kernel(&t, &[0.25, 0.5, 0.25], &[0, 1]).unwrap();
        // x = 0 never leaves; x = 1 leaks 1/4 and re-enters at state 1.
        assert_eq!(l.kernel.rows(), &[vec![0.5, 0.5], vec![0.25, 0.75]]);
        assert_eq!(l.eta_u, vec![1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(l.j_left, 0.125);
        assert_eq!(l.j_right, 0.125);
        assert!(l.stationarity_residual < 1e-15);
    }

    #[test]
    fn whole_space_is_identity() {
        let t = three_state();
        let l = localize_kernel(&t, &[0.25, 0.5, 0.25], &[0, 1, 2]).unwrap();
        assert_eq!(l.kernel.rows(), t.rows());
    }

    #[test]
    fn absorbing_subset() {
        let t = FiniteMarkovKernel::new(vec![vec![0.3, 0.7, 0.0], vec![0.6, 0.4, 0.0], vec![0.2, 0.3, 0.5]]).unwrap();
        let eta = t.stationary().unwrap();
        let l = localize_kernel(&t, &eta, &[0, 1]).unwrap();
        assert_eq!(l.j_left, 0.0);
        assert_eq!(l.kernel.rows(), &[vec![0.3, 0.7], vec![0.6, 0.4]]);
    }

    #[test]
    fn errors() {
        let t = three_state();
        assert!(localize_kernel(&t, &[0.5, 0.25, 0.25], &[0]).is_err());
        let t2 = FiniteMarkovKernel::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(localize_kernel(&t2, &[1.0, 0.0], &[1]).is_err());
    }
}
