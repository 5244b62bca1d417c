use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

/// Scalar field for coupling constructions: `f64`, or `BigRational` for
/// exact fixtures.
pub trait Weight:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Snap round-off negatives (≥ −1e-15) to zero; exact types are unchanged.
    fn clamp_roundoff(self) -> Self;
    fn to_f64(&self) -> f64;
    fn same_total(a: &Self, b: &Self) -> bool;
}

impl Weight for f64 {
    fn clamp_roundoff(self) -> Self {
        if (-1e-15..0.0).contains(&self) { 0.0 } else { self }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn same_total(a: &Self, b: &Self) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
    }
}

impl Weight for BigRational {
    fn clamp_roundoff(self) -> Self {
        self
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn same_total(a: &Self, b: &Self) -> bool {
        a == b
    }
}

/// Measure on X × X' as a dense |X| × |X'| table.
pub type Coupling<W> = Vec<Vec<W>>;

fn total<W: Weight>(v: impl IntoIterator<Item = W>) -> W {
    v.into_iter().fold(W::zero(), |a, b| a + b)
}

fn mask(n: usize, set: &[usize], name: &str) -> Result<Vec<bool>> {
    let mut m = vec![false; n];
    for &i in set {
        if i >= n {
            return Err(Error::InvalidArgument(format!("{name} contains index {i} outside 0..{n}")));
        }
        m[i] = true;
    }
    Ok(m)
}

fn measure_of<W: Weight>(eta: &[W], m: &[bool]) -> W {
    total(eta.iter().zip(m).filter(|(_, &b)| b).map(|(w, _)| w.clone()))
}

fn check_measure<W: Weight>(eta: &[W], name: &str) -> Result<()> {
    if eta.iter().any(|w| *w < W::zero()) {
        return Err(Error::InvalidMeasure(format!("{name} has a negative weight")));
    }
    Ok(())
}

/// Row sums (first marginal) and column sums (second marginal).
pub fn marginals<W: Weight>(c: &Coupling<W>) -> (Vec<W>, Vec<W>) {
    let rows = c.iter().map(|r| total(r.iter().cloned())).collect();
    let ncols = c.first().map(|r| r.len()).unwrap_or(0);
    let cols = (0..ncols).map(|j| total(c.iter().map(|r| r[j].clone()))).collect();
    (rows, cols)
}

/// Mass of the rectangle `a × a_prime`.
pub fn rectangle_mass<W: Weight>(c: &Coupling<W>, a: &[usize], a_prime: &[usize]) -> W {
    total(a.iter().flat_map(|&i| a_prime.iter().map(move |&j| c[i][j].clone())))
}

/// A coupling of η and η' giving zero mass to A × A'.
///
/// Requires η(A) < η(X∖A) and η'(A') < η'(X'∖A').
pub fn coupling_avoiding<W: Weight>(eta: &[W], eta_p: &[W], a: &[usize], a_p: &[usize]) -> Result<Coupling<W>> {
    check_measure(eta, "η")?;
    check_measure(eta_p, "η'")?;
    let ma = mask(eta.len(), a, "A")?;
    let map = mask(eta_p.len(), a_p, "A'")?;
    let c = total(eta.iter().cloned());
    let c_p = total(eta_p.iter().cloned());
    if !W::same_total(&c, &c_p) || c <= W::zero() {
        return Err(Error::InvalidMeasure(format!("total masses differ or vanish: {} vs {}", c.to_f64(), c_p.to_f64())));
    }
    let (ea, ea_p) = (measure_of(eta, &ma), measure_of(eta_p, &map));
    let (eb, eb_p) = (c.clone() - ea.clone(), c.clone() - ea_p.clone());
    if ea >= eb {
        return Err(Error::Hypothesis(format!("η(A) < η(X∖A) fails: {} ≥ {}", ea.to_f64(), eb.to_f64())));
    }
    if ea_p >= eb_p {
        return Err(Error::Hypothesis(format!("η'(A') < η'(X'∖A') fails: {} ≥ {}", ea_p.to_f64(), eb_p.to_f64())));
    }
    let bb = W::one() / eb.clone() + W::one() / eb_p.clone() - c / (eb.clone() * eb_p.clone());
    Ok((0..eta.len())
        .map(|x| {
            (0..eta_p.len())
                .map(|y| {
                    let p = eta[x].clone() * eta_p[y].clone();
                    let v = match (ma[x], map[y]) {
                        (true, true) => W::zero(),
                        (true, false) => p / eb_p.clone(),
                        (false, true) => p / eb.clone(),
                        (false, false) => bb.clone() * p,
                    };
                    v.clamp_roundoff()
                })
                .collect()
        })
        .collect())
}

/// One target rectangle A × A' with its buffer sets A ⊂ C, A' ⊂ C'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvoidPair {
    pub a: Vec<usize>,
    pub c: Vec<usize>,
    pub a_prime: Vec<usize>,
    pub c_prime: Vec<usize>,
}

/// A coupling of η and η' giving zero mass to every A_j × A'_j, built by
/// successive trimming and re-gluing.
pub fn coupling_avoiding_many<W: Weight>(eta: &[W], eta_p: &[W], pairs: &[AvoidPair]) -> Result<Coupling<W>> {
    let (n, n_p) = (eta.len(), eta_p.len());
    let Some(first) = pairs.first() else {
        return Err(Error::InvalidArgument("no target rectangles".into()));
    };
    struct Masks {
        a: Vec<bool>,
        c: Vec<bool>,
        a_p: Vec<bool>,
        c_p: Vec<bool>,
    }
    let masks = pairs
        .iter()
        .map(|p| {
            Ok(Masks {
                a: mask(n, &p.a, "A_j")?,
                c: mask(n, &p.c, "C_j")?,
                a_p: mask(n_p, &p.a_prime, "A'_j")?,
                c_p: mask(n_p, &p.c_prime, "C'_j")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let c_tot = total(eta.iter().cloned());
    for (j, m) in masks.iter().enumerate() {
        if m.a.iter().zip(&m.c).any(|(a, c)| *a && !c) || m.a_p.iter().zip(&m.c_p).any(|(a, c)| *a && !c) {
            return Err(Error::Hypothesis(format!("A_{0} ⊂ C_{0} and A'_{0} ⊂ C'_{0} required", j + 1)));
        }
        let ec = measure_of(eta, &m.c);
        if ec.clone() >= c_tot.clone() - ec.clone() {
            return Err(Error::Hypothesis(format!("hypothesis (1): η(C_{0}) < η(X∖C_{0}) fails", j + 1)));
        }
        let ec_p = measure_of(eta_p, &m.c_p);
        if ec_p.clone() >= c_tot.clone() - ec_p.clone() {
            return Err(Error::Hypothesis(format!("hypothesis (1): η'(C'_{0}) < η'(X'∖C'_{0}) fails", j + 1)));
        }
    }
    let meets = |x: &[bool], y: &[bool], neg_y: bool| x.iter().zip(y).any(|(a, b)| *a && (*b != neg_y));
    for j in 1..masks.len() {
        for i in 0..j {
            let (mi, mj) = (&masks[i], &masks[j]);
            // A_j × (C'_j)^c against A_i × A'_i, and (C_j)^c × A'_j against it.
            let first_meets = meets(&mi.a, &mj.a, false) && meets(&mi.a_p, &mj.c_p, true);
            let second_meets = meets(&mi.a, &mj.c, true) && meets(&mi.a_p, &mj.a_p, false);
            if first_meets || second_meets {
                return Err(Error::Hypothesis(format!("hypothesis (2) fails for (i, j) = ({}, {})", i + 1, j + 1)));
            }
        }
    }

    let mut cur = coupling_avoiding(eta, eta_p, &first.a, &first.a_prime)?;
    for (j, m) in masks.iter().enumerate().skip(1) {
        let in_a = |x: usize, y: usize| m.a[x] && m.a_p[y];
        let in_far = |x: usize, y: usize| !m.c[x] && !m.c_p[y];
        let in_near = |x: usize, y: usize| m.c[x] && m.c_p[y];
        let rect = |f: &dyn Fn(usize, usize) -> bool| {
            total((0..n).flat_map(|x| (0..n_p).filter(move |&y| f(x, y)).map(move |y| (x, y))).map(|(x, y)| cur[x][y].clone()))
        };
        let a_mass = rect(&in_a);
        if a_mass.is_zero() {
            continue;
        }
        let far = rect(&in_far);
        if rect(&in_near) >= far {
            return Err(Error::Hypothesis(format!("trimming inequality fails at step {}", j + 1)));
        }
        let theta = a_mass.clone() / far;
        let proj = |f: &dyn Fn(usize, usize) -> bool| -> (Vec<W>, Vec<W>) {
            let rows = (0..n).map(|x| total((0..n_p).filter(|&y| f(x, y)).map(|y| cur[x][y].clone()))).collect();
            let cols = (0..n_p).map(|y| total((0..n).filter(|&x| f(x, y)).map(|x| cur[x][y].clone()))).collect();
            (rows, cols)
        };
        let (mu, mu_p) = proj(&in_a);
        let (nu, nu_p) = proj(&in_far);
        let next: Coupling<W> = (0..n)
            .map(|x| {
                (0..n_p)
                    .map(|y| {
                        let mut v = cur[x][y].clone();
                        if in_a(x, y) {
                            v = W::zero();
                        } else if in_far(x, y) {
                            v = v.clone() - theta.clone() * v;
                        }
                        let zeta = mu[x].clone() * theta.clone() * nu_p[y].clone() / a_mass.clone();
                        let zeta_p = theta.clone() * nu[x].clone() * mu_p[y].clone() / a_mass.clone();
                        (v + zeta + zeta_p).clamp_roundoff()
                    })
                    .collect()
            })
            .collect();
        cur = next;
    }
    if cur.iter().flatten().any(|v| *v < W::zero()) {
        return Err(Error::Degenerate("coupling acquired negative mass".into()));
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn empty_sets_give_scaled_product() {
        let eta = vec![q(1, 2), q(1, 3), q(1, 6)];
        let eta_p = vec![q(1, 4), q(3, 4)];
        let c = coupling_avoiding(&eta, &eta_p, &[], &[]).unwrap();
        for x in 0..3 {
            for y in 0..2 {
                assert_eq!(c[x][y], eta[x].clone() * eta_p[y].clone());
            }
        }
    }

    #[test]
    fn uniform_three_points_oracle() {
        let eta = vec![q(1, 3); 3];
        let c = coupling_avoiding(&eta, &eta, &[0], &[0]).unwrap();
        // η(B) = 2/3: (A,B') entries (1/9)/(2/3) = 1/6, (B,B') coefficient 3/2 + 3/2 − 9/4 = 3/4.
        let expect = [[q(0, 1), q(1, 6), q(1, 6)], [q(1, 6), q(1, 12), q(1, 12)], [q(1, 6), q(1, 12), q(1, 12)]];
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(c[x][y], expect[x][y]);
            }
        }
        let (r, k) = marginals(&c);
        assert_eq!(r, eta);
        assert_eq!(k, eta);
    }

    #[test]
    fn precondition_named() {
        let eta = vec![0.5, 0.5];
        let err = coupling_avoiding(&eta, &eta, &[0], &[]).unwrap_err().to_string();
        assert!(err.contains("η(A) < η(X∖A)"), "{err}");
    }

    #[test]
    fn single_pair_matches_closed_form() {
        let eta = vec![0.1, 0.2, 0.3, 0.25, 0.15];
        let eta_p = vec![0.3, 0.1, 0.2, 0.2, 0.2];
        let pair = AvoidPair { a: vec![0], c: vec![0, 1], a_prime: vec![1], c_prime: vec![1, 2] };
        let one = coupling_avoiding(&eta, &eta_p, &[0], &[1]).unwrap();
        let many = coupling_avoiding_many(&eta, &eta_p, &[pair]).unwrap();
        for x in 0..5 {
            for y in 0..5 {
                assert!((one[x][y] - many[x][y]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_nested_pairs_exhaustive() {
        let eta: Vec<BigRational> = [3, 1, 2, 4, 5].iter().map(|&k| q(k, 15)).collect();
        let eta_p: Vec<BigRational> = [2, 2, 3, 4, 4].iter().map(|&k| q(k, 15)).collect();
        let pairs = vec![
            AvoidPair { a: vec![0], c: vec![0, 1], a_prime: vec![0], c_prime: vec![0, 1] },
            AvoidPair { a: vec![2], c: vec![1, 2], a_prime: vec![2], c_prime: vec![1, 2] },
        ];
        let c = coupling_avoiding_many(&eta, &eta_p, &pairs).unwrap();
        let (r, k) = marginals(&c);
        assert_eq!(r, eta);
        assert_eq!(k, eta_p);
        assert!(rectangle_mass(&c, &[0], &[0]).is_zero());
        assert!(rectangle_mass(&c, &[2], &[2]).is_zero());
        assert!(c.iter().flatten().all(|v| !v.is_negative()));
    }

    #[test]
    fn disjointness_violation_names_pair() {
        let eta = vec![0.2; 5];
        let pairs = vec![
            AvoidPair { a: vec![0], c: vec![0], a_prime: vec![0], c_prime: vec![0] },
            AvoidPair { a: vec![0], c: vec![0, 1], a_prime: vec![1], c_prime: vec![1] },
        ];
        let err = coupling_avoiding_many(&eta, &eta, &pairs).unwrap_err().to_string();
        assert!(err.contains("(1, 2)"), "{err}");
    }
}
