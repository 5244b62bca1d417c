//! End-to-end acceptance criteria. Prints one `[PASS]`/`[FAIL]` line per
//! criterion and exits non-zero if any fails.

use lyap_core::experiments::{self, builders, kifer_walk_oracle, ltheta, Direction, ExperimentConfig, MeasureSpec, Report, SweepConfig};
use lyap_core::linalg::{random::gaussian_matrix, subspace_distance, SubspacePoint};
use lyap_core::lyapunov::{
    azuma_bound, binomial_tail_abs, full_spectrum_qr, large_deviation_probe, spectrum_via_exterior, top_exponent, McConfig,
};
use lyap_core::margulis::{drift_probe, drift_trend, repeller_probe, DriftReport, MargulisParams, ProbeConfig};
use lyap_core::markov::{
    coupling_avoiding, coupling_avoiding_many, localize_kernel, margulis_mass_bound_check, marginals, random::random_drift_chain,
    random::random_kernel, rectangle_mass, AvoidPair, Coupling,
};
use lyap_core::measures::{support_constants, AtomicMatrixMeasure};
use lyap_core::parallel::with_workers;
use lyap_core::rng;
use lyap_core::stationary::{equator_detect, furstenberg_integral, invariant_subspace_search, stationary_estimate};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use std::f64::consts::LN_2;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

type Verdict = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok { Ok(detail) } else { Err(detail) }
}

fn example32() -> AtomicMatrixMeasure {
    builders::example32(2.0, 0.1, 0.5).unwrap()
}

fn c01_example32_spectrum() -> Verdict {
    let start = Instant::now();
    let s = full_spectrum_qr(&example32(), &McConfig::new(100_000, 64, 1)).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let sum: f64 = s.values.iter().sum();
    let ok = (s.values[0] - LN_2).abs() <= 0.05
        && s.values[1].abs() <= 0.02
        && (s.values[2] + LN_2).abs() <= 0.05
        && sum.abs() <= 1e-9
        && secs < 30.0;
    verdict(ok, format!("λ̂ = {:?}, Σ = {sum:e}, {secs:.1}s", s.values))
}

fn c02_equator() -> Verdict {
    let nu = example32();
    let eq = equator_detect(&nu, &McConfig::new(20_000, 16, 2)).map_err(|e| e.to_string())?.ok_or("no equator")?;
    let e3 = SubspacePoint::coordinate(3, &[2]);
    let e12 = SubspacePoint::coordinate(3, &[0, 1]);
    let dist = subspace_distance(&eq.subspace, &e3).unwrap();
    let mut inv = invariant_subspace_search(&nu, 1);
    inv.extend(invariant_subspace_search(&nu, 2));
    let has = |t: &SubspacePoint| inv.iter().any(|l| l.dim_sub() == t.dim_sub() && subspace_distance(l, t).unwrap() < 1e-9);
    let ok = eq.dim == 1 && dist < 1e-6 && inv.len() == 2 && has(&e3) && has(&e12);
    verdict(ok, format!("d(equator, E_3) = {dist:e}; {} invariant subspaces (E_3 {}, E_12 {})", inv.len(), has(&e3), has(&e12)))
}

fn c03_kifer() -> Verdict {
    let start = Instant::now();
    let l0 = lyap_core::lyapunov::deterministic_spectrum(&builders::kifer(0.0).unwrap()).unwrap().values[0];
    let nu = builders::kifer(0.05).unwrap();
    let s = full_spectrum_qr(&nu, &McConfig::new(1_000_000, 16, 3)).map_err(|e| e.to_string())?;
    let (oracle, ohw) = kifer_walk_oracle(0.05, 1_000_000, 16, 3);
    let secs = start.elapsed().as_secs_f64();
    let (l, hw) = (s.values[0], s.half_width[0]);
    let ok = l0 == LN_2 && l.abs() <= 0.02 && oracle.abs() <= 0.02 && (l - oracle).abs() <= 2.0 * (hw + ohw) + 1e-3 && l0 - l >= 0.6 && secs < 60.0;
    verdict(ok, format!("λ̂(0) = {l0}, λ̂(0.05) = {l:.5} ± {hw:.5}, walk oracle {oracle:.5} ± {ohw:.5}, {secs:.1}s"))
}

fn c04_ltheta() -> Verdict {
    let quarter = ltheta::ltheta_series(0.25, 40);
    let sim_q = ltheta::ltheta_simulate(0.25, 10_000, 4, 4);
    let (a1, a2) = builders::ltheta_atoms(0.25);
    let zero = (&a1 * &a2 * &a1).iter().all(|v| *v == 0.0);
    let s0 = ltheta::ltheta_series(0.0, 40);
    let m0 = ltheta::ltheta_simulate(0.0, 100_000, 4, 4);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let sg = ltheta::ltheta_series(golden, 40);
    let mg = ltheta::ltheta_simulate(golden, 1_000_000, 16, 4);
    let diff = (sg.value - mg.estimate).abs();
    let ok = quarter.neg_infinite && sim_q.neg_infinite && zero && s0.value == 0.0 && m0.estimate == 0.0 && diff <= 0.01;
    verdict(ok, format!("θ=1/4: −∞ {} / A1A2A1 = 0 {zero}; θ=0: {} and {}; golden: |{:.5} − {:.5}| = {diff:.2e}", quarter.neg_infinite, s0.value, m0.estimate, sg.value, mg.estimate))
}

fn random_measure(d: usize, seed: u64) -> AtomicMatrixMeasure {
    let mut r = rng::stream(seed, rng::domain::AUX, d as u64);
    let k = r.random_range(2..=3);
    let w: Vec<f64> = (0..k).map(|_| 0.2 + r.random::<f64>()).collect();
    let tot: f64 = w.iter().sum();
    let atoms = w.iter().map(|p| (p / tot, gaussian_matrix(d, d, &mut r) / (d as f64).sqrt())).collect::<Vec<_>>();
    let mut atoms = atoms;
    let fix: f64 = 1.0 - atoms.iter().map(|a| a.0).sum::<f64>();
    atoms[0].0 += fix;
    AtomicMatrixMeasure::new(atoms).unwrap()
}

fn c05_exterior() -> Verdict {
    let mut agree = 0;
    let mut worst = Vec::new();
    for case in 0..20u64 {
        let d = 2 + (case % 3) as usize;
        let nu = random_measure(d, 500 + case);
        let qr = full_spectrum_qr(&nu, &McConfig::new(20_000, 16, 10 + case)).map_err(|e| e.to_string())?;
        let ex = spectrum_via_exterior(&nu, &McConfig::new(20_000, 16, 1000 + case)).map_err(|e| e.to_string())?;
        let ok = (0..d).all(|l| (qr.values[l] - ex.values[l]).abs() <= qr.half_width[l] + ex.half_width[l]);
        if ok {
            agree += 1;
        } else {
            worst.push(case);
        }
    }
    verdict(agree >= 18, format!("{agree}/20 within combined half-widths (disagreeing cases {worst:?})"))
}

fn c06_furstenberg() -> Verdict {
    let mut r = rng::stream(6, rng::domain::AUX, 0);
    let pair = AtomicMatrixMeasure::new(vec![(0.5, gaussian_matrix(2, 2, &mut r)), (0.5, gaussian_matrix(2, 2, &mut r))]).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, nu) in [("block-rotation triple", example32()), ("random 2×2 pair", pair)] {
        let eta = stationary_estimate(&nu, 200, 6, 1e-12).map_err(|e| e.to_string())?;
        let integral = furstenberg_integral(&nu, &eta.measure).map_err(|e| e.to_string())?;
        let top = top_exponent(&nu, &McConfig::new(100_000, 32, 60)).map_err(|e| e.to_string())?;
        ok &= (integral - top.estimate).abs() <= 0.05;
        lines.push(format!("{name}: ∫ = {integral:.4}, λ̂ = {:.4}", top.estimate));
    }
    verdict(ok, lines.join("; "))
}

fn c07_localization() -> Verdict {
    let mut r = rng::stream(7, rng::domain::AUX, 0);
    let (mut worst_res, mut worst_j) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = r.random_range(2..=20);
        let t = random_kernel(n, 0.5, &mut r);
        let eta = t.stationary().map_err(|e| e.to_string())?;
        let mut states: Vec<usize> = (0..n).collect();
        states.shuffle(&mut r);
        let k = r.random_range(1..n);
        let u: Vec<usize> = states[..k].to_vec();
        let loc = localize_kernel(&t, &eta, &u).map_err(|e| e.to_string())?;
        let mass: f64 = loc.eta_u.iter().sum();
        let eu: Vec<f64> = loc.eta_u.iter().map(|v| v / mass).collect();
        let pushed = loc.kernel.push(&eu);
        let res: f64 = pushed.iter().zip(&eu).map(|(a, b)| (a - b).abs()).sum();
        worst_res = worst_res.max(res);
        worst_j = worst_j.max((loc.j_left - loc.j_right).abs());
    }
    verdict(worst_res <= 1e-10 && worst_j <= 1e-12, format!("max ‖η_U T_U − η_U‖₁ = {worst_res:e}, max |J_left − J_right| = {worst_j:e}"))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn random_rational_measure<R: Rng>(n: usize, r: &mut R) -> Vec<BigRational> {
    let w: Vec<i64> = (0..n).map(|_| r.random_range(1..=9)).collect();
    let tot: i64 = w.iter().sum();
    w.into_iter().map(|v| q(v, tot)).collect()
}

fn mass(eta: &[BigRational], s: &[usize]) -> BigRational {
    s.iter().fold(BigRational::zero(), |a, &i| a + eta[i].clone())
}

fn valid_coupling(c: &Coupling<BigRational>, eta: &[BigRational], eta_p: &[BigRational], forbidden: &[(Vec<usize>, Vec<usize>)]) -> bool {
    let (m, mp) = marginals(c);
    m == eta
        && mp == eta_p
        && c.iter().flatten().all(|v| *v >= BigRational::zero())
        && forbidden.iter().all(|(a, ap)| rectangle_mass(c, a, ap).is_zero())
}

fn c08_couplings() -> Verdict {
    let mut r = rng::stream(8, rng::domain::AUX, 0);
    let (mut single, mut many, mut sym) = (0, 0, 0);
    let mut tried_many = 0;
    for _ in 0..100 {
        let n = r.random_range(3..=8);
        let eta = random_rational_measure(n, &mut r);
        let eta_p = random_rational_measure(n, &mut r);
        let pick = |r: &mut rand_chacha::ChaCha8Rng, eta: &[BigRational]| loop {
            let s: Vec<usize> = (0..eta.len()).filter(|_| r.random::<f64>() < 0.3).collect();
            if mass(eta, &s) * q(2, 1) < q(1, 1) {
                return s;
            }
        };
        let a = pick(&mut r, &eta);
        let ap = pick(&mut r, &eta_p);
        if let Ok(c) = coupling_avoiding(&eta, &eta_p, &a, &ap) {
            single += valid_coupling(&c, &eta, &eta_p, &[(a.clone(), ap.clone())]) as usize;
        }
        let c = coupling_avoiding(&eta, &eta, &a, &a).map_err(|e| e.to_string())?;
        sym += (0..n).all(|x| (0..n).all(|y| c[x][y] == c[y][x])) as usize;
    }
    while many < 100 && tried_many < 10_000 {
        tried_many += 1;
        let n = r.random_range(4..=10);
        let eta = random_rational_measure(n, &mut r);
        let eta_p = random_rational_measure(n, &mut r);
        let mut xs: Vec<usize> = (0..n).collect();
        let mut ys: Vec<usize> = (0..n).collect();
        xs.shuffle(&mut r);
        ys.shuffle(&mut r);
        let k = r.random_range(2..=3);
        let per = (n / k).max(1);
        let mut pairs = Vec::new();
        for j in 0..k {
            let block: Vec<usize> = xs.iter().skip(j * per).take(per).cloned().collect();
            let block_p: Vec<usize> = ys.iter().skip(j * per).take(per).cloned().collect();
            if block.is_empty() {
                break;
            }
            let na = r.random_range(1..=block.len());
            let nap = r.random_range(1..=block_p.len());
            pairs.push(AvoidPair { a: block[..na].to_vec(), c: block.clone(), a_prime: block_p[..nap].to_vec(), c_prime: block_p.clone() });
        }
        let half = q(1, 2);
        if pairs.iter().any(|p| mass(&eta, &p.c) >= half || mass(&eta_p, &p.c_prime) >= half) {
            continue;
        }
        let c = coupling_avoiding_many(&eta, &eta_p, &pairs).map_err(|e| format!("valid instance rejected: {e}"))?;
        let forbidden: Vec<(Vec<usize>, Vec<usize>)> = pairs.iter().map(|p| (p.a.clone(), p.a_prime.clone())).collect();
        if !valid_coupling(&c, &eta, &eta_p, &forbidden) {
            return Err(format!("invalid coupling for pairs {pairs:?}"));
        }
        let sym_pairs: Vec<AvoidPair> = pairs.iter().map(|p| AvoidPair { a_prime: p.a.clone(), c_prime: p.c.clone(), ..p.clone() }).collect();
        let cs = coupling_avoiding_many(&eta, &eta, &sym_pairs).map_err(|e| e.to_string())?;
        if !(0..n).all(|x| (0..n).all(|y| cs[x][y] == cs[y][x])) {
            return Err("symmetric instance gave an asymmetric coupling".into());
        }
        many += 1;
    }
    verdict(single == 100 && sym == 100 && many == 100, format!("single-rectangle {single}/100, swap-invariant {sym}/100, multi-rectangle {many}/100"))
}

fn c09_mass_bound() -> Verdict {
    let mut r = rng::stream(9, rng::domain::AUX, 0);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let n = r.random_range(2..=20);
        let (t, psi, a) = random_drift_chain(n, &mut r);
        let zeta = t.stationary().map_err(|e| e.to_string())?;
        let rep = margulis_mass_bound_check(&t, &psi, &a, &zeta).map_err(|e| e.to_string())?;
        if !rep.hypotheses_hold || rep.satisfied != Some(true) {
            return Err(format!("report {rep:?}"));
        }
        worst = worst.min(rep.zeta_b - rep.bound.unwrap());
    }
    verdict(worst >= -1e-12, format!("min ζ(B) − κ_A/(κ_A+κ_B)·ζ(X) = {worst:e} over 100 chains"))
}

fn trend_ok(reports: &[DriftReport]) -> (bool, String) {
    let signs = reports.iter().all(|r| r.mean_drift < 0.0 && r.median < 0.0 && r.bound_violations == 0);
    let (sm, rm) = drift_trend(reports, false);
    let (sd, rd) = drift_trend(reports, true);
    (signs && sm < 0.0 && rm >= 0.8 && sd < 0.0 && rd >= 0.8, format!("slopes {sm:.4}/{sd:.4}, R² {rm:.4}/{rd:.4}"))
}

fn c10_drift() -> Verdict {
    let nu = example32();
    let e = SubspacePoint::coordinate(3, &[2]);
    let b = support_constants(&nu, 0.0).b;
    let mut drift = Vec::new();
    let mut rep = Vec::new();
    for n in [10, 20, 40] {
        let cfg = ProbeConfig { n, n_samples: 1000, band: (1e-20, 1e-19), seed: 10 };
        drift.push(drift_probe(&nu, &e, &MargulisParams::defaults(1, 0.1, n, b), &cfg).map_err(|x| x.to_string())?);
        rep.push(repeller_probe(&nu, &e, &cfg).map_err(|x| x.to_string())?);
    }
    let (d_ok, d_msg) = trend_ok(&drift);
    let (r_ok, r_msg) = trend_ok(&rep);
    verdict(d_ok && r_ok, format!("drift {d_msg}; repeller {r_msg}; no C″ violations {}", (d_ok && r_ok)))
}

fn c11_azuma() -> Verdict {
    let mut worst = f64::NEG_INFINITY;
    for n in [10usize, 20, 50, 100, 200] {
        for frac in [0.1, 0.25, 0.5, 0.8] {
            let s = (frac * n as f64).round();
            worst = worst.max(binomial_tail_abs(n, s) - azuma_bound(1.0, n, s));
        }
    }
    let ld = large_deviation_probe(&example32(), 0.2, &[5, 10, 15, 20, 25], None, 4000, 11).map_err(|e| e.to_string())?;
    let r2 = ld.r_squared.unwrap_or(0.0);
    let decreasing = ld.rows.windows(2).all(|w| w[1].fraction < w[0].fraction);
    let ok = worst <= 0.0 && decreasing && r2 >= 0.9 && ld.rate.is_some_and(|c| c > 0.0);
    let fr: Vec<f64> = ld.rows.iter().map(|r| r.fraction).collect();
    verdict(ok, format!("max(tail − bound) = {worst:e} on 20 points; fractions {fr:?}, decay rate {:?}, R² = {r2:.4}", ld.rate))
}

fn sweep(direction: Direction, seed: u64) -> Result<experiments::Outcome, String> {
    let cfg = ExperimentConfig::Sweep(SweepConfig {
        measure: MeasureSpec::Example32 { sigma: 2.0, theta: 0.1, p: 0.5 },
        seed,
        direction,
        h_grid: vec![0.0, 0.1, 0.05, 0.025],
        n_steps: 20_000,
        n_trials: 32,
    });
    experiments::run(&cfg, Path::new(".")).map_err(|e| e.to_string())
}

fn c12_sweep() -> Verdict {
    let conj = sweep(Direction::Conjugation { plane: None }, 12)?;
    let entry = sweep(Direction::Entry { atom: 0, row: 0, col: 0 }, 12)?;
    let detail = |o: &experiments::Outcome| o.checks.iter().map(|c| format!("{}={}", c.name, c.passed)).collect::<Vec<_>>().join(",");
    verdict(conj.passed() && entry.passed(), format!("conjugation [{}]; entry [{}]", detail(&conj), detail(&entry)))
}

fn c13_reproducibility() -> Verdict {
    let mut lines = Vec::new();
    for (name, v) in experiments::templates() {
        let (cfg, echo) = ExperimentConfig::from_value(v, Some(name), None).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for w in [1, 4, 8] {
            let out = with_workers(w, || experiments::run(&cfg, Path::new("."))).map_err(|e| format!("{name}: {e}"))?;
            let report = serde_json::to_string(&Report::new(name, echo.clone(), &out)).unwrap();
            outputs.push((report, out.tables));
        }
        if !outputs.windows(2).all(|p| p[0] == p[1]) {
            return Err(format!("{name} differs across worker counts"));
        }
        lines.push(name);
    }
    Ok(format!("{} experiments identical at 1, 4 and 8 workers", lines.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 13] = [
        ("1 block-rotation spectrum", c01_example32_spectrum),
        ("2 equator and invariant subspaces", c02_equator),
        ("3 kifer jump", c03_kifer),
        ("4 L(θ)", c04_ltheta),
        ("5 exterior-power identity", c05_exterior),
        ("6 furstenberg formula", c06_furstenberg),
        ("7 localization", c07_localization),
        ("8 couplings", c08_couplings),
        ("9 margulis mass bound", c09_mass_bound),
        ("10 drift direction", c10_drift),
        ("11 azuma and large deviations", c11_azuma),
        ("12 continuity sweep", c12_sweep),
        ("13 reproducibility", c13_reproducibility),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let stdout = std::io::stdout();
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let v = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let mut out = stdout.lock();
        match v {
            Ok(d) => writeln!(out, "[PASS] criterion {name}: {d} ({secs:.1}s)").unwrap(),
            Err(d) => {
                failed += 1;
                writeln!(out, "[FAIL] criterion {name}: {d} ({secs:.1}s)").unwrap()
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

