use lyap_core::linalg::random::{gaussian_matrix, haar_orthogonal, unit_vector};
use lyap_core::linalg::{projective_distance, subspace_distance, FlagPoint, Matrix, ProjectivePoint, SubspacePoint};
use lyap_core::lyapunov::{full_spectrum_qr, McConfig};
use lyap_core::margulis::{cutoff_psi, psi_hat, psi_r, vertical_angle_1, MargulisParams};
use lyap_core::markov::random::random_kernel;
use lyap_core::markov::{coupling_avoiding, localize_kernel, marginals, rectangle_mass};
use lyap_core::measures::AtomicMatrixMeasure;
use lyap_core::parallel::with_workers;
use lyap_core::rng::{domain, stream};
use lyap_core::stationary::EmpiricalMeasure;
use lyap_core::stationary::wasserstein;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn line(seed: u64, d: usize) -> ProjectivePoint {
    ProjectivePoint::new(unit_vector(d, &mut stream(seed, domain::AUX, 0))).unwrap()
}

fn flag(seed: u64, d: usize, r: usize) -> FlagPoint {
    FlagPoint::from_frame(&gaussian_matrix(d, r, &mut stream(seed, domain::AUX, 1))).unwrap()
}

fn subspace(seed: u64, d: usize, k: usize) -> SubspacePoint {
    SubspacePoint::span_of(&gaussian_matrix(d, k, &mut stream(seed, domain::AUX, 2))).unwrap()
}

fn orthogonal(seed: u64, d: usize) -> Matrix {
    haar_orthogonal(d, &mut stream(seed, domain::AUX, 3))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distances_are_orthogonally_invariant(seed in any::<u64>(), d in 2usize..6) {
        let (x, y, k) = (line(seed, d), line(seed ^ 1, d), orthogonal(seed, d));
        let before = projective_distance(&x, &y).unwrap();
        let after = projective_distance(&x.act(&k).unwrap(), &y.act(&k).unwrap()).unwrap();
        prop_assert!(rel_close(before, after, 1e-12));
        prop_assert!((0.0..=1.0 + 1e-15).contains(&before));
    }

    #[test]
    fn vertical_angle_is_symmetric(seed in any::<u64>(), d in 3usize..6) {
        let (x, y, e) = (line(seed, d), line(seed ^ 7, d), subspace(seed, d, d - 2));
        let a = vertical_angle_1(&x, &y, &e).unwrap();
        let b = vertical_angle_1(&y, &x, &e).unwrap();
        prop_assert!(rel_close(a, b, 1e-12));
    }

    #[test]
    fn margulis_functions_are_isometry_invariant(seed in any::<u64>(), d in 3usize..6, r in 1usize..3) {
        let r = r.min(d - 2);
        let (x, y, e) = (flag(seed, d, r), flag(seed ^ 3, d, r), subspace(seed, d, d - r));
        let k = orthogonal(seed ^ 5, d);
        let (xk, yk, ek) = (x.act(&k).unwrap(), y.act(&k).unwrap(), e.act(&k).unwrap());
        let p = MargulisParams::defaults(r, 0.1, 10, 1.0);
        for f in [psi_r, psi_hat, cutoff_psi] {
            let a = f(&x, &y, &e, &p).unwrap();
            let b = f(&xk, &yk, &ek, &p).unwrap();
            prop_assert!(rel_close(a, b, 1e-9), "{a} vs {b}");
        }
        prop_assert!(psi_r(&x, &y, &e, &p).unwrap() <= psi_hat(&x, &y, &e, &p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn subspace_distance_is_symmetric(seed in any::<u64>(), d in 2usize..6) {
        let k = 1 + (seed as usize) % (d - 1);
        let (u, v) = (subspace(seed, d, k), subspace(seed ^ 11, d, k));
        let a = subspace_distance(&u, &v).unwrap();
        prop_assert!(rel_close(a, subspace_distance(&v, &u).unwrap(), 1e-12));
        prop_assert!(subspace_distance(&u, &u).unwrap() < 1e-12);
    }

    #[test]
    fn float_coupling_has_the_right_marginals(
        eta in prop::collection::vec(0.01f64..1.0, 4..9),
        eta_p in prop::collection::vec(0.01f64..1.0, 4..9),
    ) {
        let t: f64 = eta.iter().sum();
        let tp: f64 = eta_p.iter().sum();
        let eta_p: Vec<f64> = eta_p.iter().map(|w| w * t / tp).collect();
        let c = coupling_avoiding(&eta, &eta_p, &[0], &[0]);
        let ok = eta[0] < t - eta[0] && eta_p[0] < t - eta_p[0];
        prop_assume!(ok);
        let c = c.unwrap();
        let (rows, cols) = marginals(&c);
        for (a, b) in rows.iter().zip(&eta) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        for (a, b) in cols.iter().zip(&eta_p) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert_eq!(rectangle_mass(&c, &[0], &[0]), 0.0);
        prop_assert!(c.iter().flatten().all(|w| *w >= 0.0));
    }

    #[test]
    fn exact_coupling_conserves_mass(
        eta in prop::collection::vec(1i64..20, 3..7),
        eta_p in prop::collection::vec(1i64..20, 3..7),
    ) {
        let q = |v: &[i64], scale: i64| -> Vec<BigRational> {
            v.iter().map(|&w| BigRational::new(BigInt::from(w * scale), BigInt::from(1))).collect()
        };
        let (s, sp): (i64, i64) = (eta.iter().sum(), eta_p.iter().sum());
        let (a, b) = (q(&eta, sp), q(&eta_p, s));
        prop_assume!(2 * eta[0] < s && 2 * eta_p[0] < sp);
        let c = coupling_avoiding(&a, &b, &[0], &[0]).unwrap();
        let (rows, cols) = marginals(&c);
        prop_assert_eq!(rows, a);
        prop_assert_eq!(cols, b);
        prop_assert!(rectangle_mass(&c, &[0], &[0]) == BigRational::from_integer(0.into()));
    }

    #[test]
    fn localized_measure_is_stationary(seed in any::<u64>(), n in 3usize..9) {
        let t = random_kernel(n, 0.5, &mut stream(seed, domain::AUX, 0));
        let eta = t.stationary().unwrap();
        let u: Vec<usize> = (0..n).filter(|i| (seed >> i) & 1 == 1 || *i == 0).collect();
        let loc = localize_kernel(&t, &eta, &u).unwrap();
        prop_assert!(loc.stationarity_residual <= 1e-10);
        prop_assert!((loc.j_left - loc.j_right).abs() <= 1e-10);
        let mass: f64 = loc.states.iter().map(|&i| eta[i]).sum();
        prop_assert!((loc.eta_u.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (w, &i) in loc.eta_u.iter().zip(&loc.states) {
            prop_assert!((w * mass - eta[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn wasserstein_is_a_symmetric_metric(seed in any::<u64>(), m in 1usize..6) {
        let pts = |s: u64| (0..m).map(|i| line(s.wrapping_add(i as u64), 3)).collect::<Vec<_>>();
        let a = EmpiricalMeasure::uniform(pts(seed)).unwrap();
        let b = EmpiricalMeasure::uniform(pts(seed ^ 0xff)).unwrap();
        let ab = wasserstein(&a, &b, 256);
        prop_assert!(rel_close(ab, wasserstein(&b, &a, 256), 1e-12));
        prop_assert!(wasserstein(&a, &a, 256).abs() <= 1e-12);
        prop_assert!(ab >= 0.0 && ab <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_is_invariant_under_orthogonal_conjugation(seed in any::<u64>()) {
        let mut g = stream(seed, domain::AUX, 9);
        let atoms: Vec<Matrix> = (0..2).map(|_| gaussian_matrix(3, 3, &mut g) / 3f64.sqrt()).collect();
        let nu = AtomicMatrixMeasure::uniform(atoms).unwrap();
        let k = orthogonal(seed, 3);
        let kt = k.transpose();
        let conj = nu.map_atoms(|a| &k * a * &kt).unwrap();
        let cfg = McConfig::new(2000, 8, seed);
        let a = full_spectrum_qr(&nu, &cfg).unwrap();
        let b = full_spectrum_qr(&conj, &cfg).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            // Same draws, but the start frame is not conjugated: O(1/n) gap.
            prop_assert!((x - y).abs() <= 1e-4, "{x} vs {y}");
        }
    }

    #[test]
    fn spectrum_is_identical_across_worker_counts(seed in any::<u64>()) {
        let mut g = stream(seed, domain::AUX, 4);
        let atoms: Vec<Matrix> = (0..3).map(|_| gaussian_matrix(3, 3, &mut g)).collect();
        let nu = AtomicMatrixMeasure::uniform(atoms).unwrap();
        let cfg = McConfig::new(500, 6, seed);
        let runs: Vec<Vec<f64>> = [1, 3, 8]
            .iter()
            .map(|&w| with_workers(w, || full_spectrum_qr(&nu, &cfg).unwrap().values))
            .collect();
        prop_assert_eq!(&runs[0], &runs[1]);
        prop_assert_eq!(&runs[0], &runs[2]);
    }
}
