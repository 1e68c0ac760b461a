//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test -p qroc-core --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qroc_core::asymptotics::{
    check_hoeffding_saturation, logconvexity_check, ncopy_fidelity, ncopy_qs, oaqcb_ncopy_point, stein_exponents,
};
use qroc_core::bounds::{
    bound_curve, caqcb_alpha, fidelity_lb_alpha, fidelity_lb_point, fidelity_ub_alpha, oaqcb_alpha_at_beta,
    oaqcb_point, qre_lb_alpha, qre_lb_beta, uniform_grid, BoundSpec,
};
use qroc_core::exact::{
    exact_alpha_at_beta, exact_beta_at_alpha, exact_errors, locate_kernel_points, roc_curve_default,
    DEFAULT_KERNEL_SCAN,
};
use qroc_core::gaussian::{
    gaussian_fidelity_truncated, gaussian_q_s, gaussian_q_s_logderiv, gaussian_qs_evaluator, gaussian_to_fock,
    tmsv_through_thermal_loss,
};
use qroc_core::sequences::{adaptive_sequence_errors, nonadaptive_three_copy, ThreeCopyRule};
use qroc_core::states::{chernoff_s_star, fidelity, overlap_decomposition, q_s, relative_entropies};
use qroc_core::{DensityMatrix, EntropyUnit, GaussianState, QsEvaluator};
use rand::Rng;

fn finish(id: u32, name: &str, worst: f64, tol: f64, start: Instant, limit_s: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= tol && elapsed < limit_s;
    let budget = if limit_s.is_finite() { format!(" of {limit_s}s") } else { String::new() };
    report(
        id,
        name,
        pass,
        &format!("worst {worst:.3e} vs tol {tol:.0e}, {elapsed:.2}s{budget}"),
    );
    assert!(worst <= tol, "criterion {id}: worst deviation {worst:e} exceeds {tol:e}");
    assert!(elapsed < limit_s, "criterion {id}: {elapsed:.2}s exceeds {limit_s}s");
}

fn real_sym(rows: &[[f64; 3]; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| rows[i][j])
}

#[test]
fn c01_qubit_pair_matches_likelihood_ratio_enumeration() {
    let start = Instant::now();
    let p1 = [0.8, 0.2];
    let p2 = [0.6, 0.4];
    let rho1 = DensityMatrix::from_diagonal(&p1).unwrap();
    let rho2 = DensityMatrix::from_diagonal(&p2).unwrap();
    let oracle = classical_roc_vertices(&p1, &p2);

    let expected = [(0.0, 1.0), (0.6, 0.2), (1.0, 0.0)];
    let mut worst: f64 = 0.0;
    for (o, e) in oracle.iter().zip(expected) {
        worst = worst.max((o.0 - e.0).abs()).max((o.1 - e.1).abs());
    }
    let curve = roc_curve_default(&rho1, &rho2).unwrap();
    for b in beta_grid(1001) {
        let want = interpolate_vertices(&oracle, b);
        worst = worst.max((curve.alpha_at(b).unwrap() - want).abs());
        worst = worst.max((exact_alpha_at_beta(&rho1, &rho2, b).unwrap() - want).abs());
    }
    finish(1, "qubit pair vs likelihood-ratio oracle", worst, 1e-9, start, 1.0);
}

/// Errors from the derivative of `t(p) = ‖(1-p)ρ2 - pρ1‖₁`, computed with
/// a real symmetric eigensolver.
fn slope_oracle(r1: &DMatrix<f64>, r2: &DMatrix<f64>, p: f64) -> (f64, f64) {
    let x = r2 * (1.0 - p) - r1 * p;
    let eig = SymmetricEigen::new(x);
    let sum = r1 + r2;
    let mut t = 0.0;
    let mut dt = 0.0;
    for k in 0..eig.eigenvalues.len() {
        let l = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        t += l.abs();
        dt += l.signum() * -(v.transpose() * &sum * v)[(0, 0)];
    }
    let alpha = 0.5 * (1.0 - t) - 0.5 * (1.0 - p) * dt;
    let beta = 0.5 * (1.0 - t) + 0.5 * p * dt;
    (alpha, beta)
}

#[test]
fn c02_qutrit_pair_single_curved_stretch() {
    let start = Instant::now();
    let r1 = real_sym(&[[0.6, 0.0, 0.0], [0.0, 0.2, 0.0], [0.0, 0.0, 0.2]]);
    let r2 = real_sym(&[[0.6, 0.1, 0.1], [0.1, 0.2, 0.1], [0.1, 0.1, 0.2]]);
    let to_rows = |m: &DMatrix<f64>| (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect::<Vec<Vec<f64>>>();
    let rho1 = DensityMatrix::from_real_rows(&to_rows(&r1)).unwrap();
    let rho2 = DensityMatrix::from_real_rows(&to_rows(&r2)).unwrap();

    let kernels = locate_kernel_points(&rho1, &rho2, DEFAULT_KERNEL_SCAN, None);
    let mut worst: f64 = 0.0;
    // Each located kernel must be a genuine zero of the oracle spectrum.
    for &k in &kernels {
        let eig = SymmetricEigen::new(&r2 * (1.0 - k) - &r1 * k);
        let smallest = eig.eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        worst = worst.max(smallest);
    }
    let kernel_count_ok = kernels.len() == 3;

    let n = 10_000;
    let mut regimes = vec![Vec::new(); kernels.len() + 1];
    for i in 1..n {
        let p = i as f64 / n as f64;
        if kernels.iter().any(|k| (p - k).abs() < 1e-6) {
            continue;
        }
        let (a, b) = exact_errors(&rho1, &rho2, p, 0.0).unwrap();
        let (oa, ob) = slope_oracle(&r1, &r2, p);
        worst = worst.max((a - oa).abs()).max((b - ob).abs());
        let regime = kernels.iter().filter(|&&k| p > k).count();
        regimes[regime].push((b, a));
    }
    // Continuity: just left of a kernel the q = 0 end is reached, just right the q = 1 end.
    let h = 1e-8;
    for &k in &kernels {
        let at = |p, q| exact_errors(&rho1, &rho2, p, q).unwrap();
        let (l, r) = (at(k - h, 0.0), at(k + h, 0.0));
        let (e0, e1) = (at(k, 0.0), at(k, 1.0));
        let gap = (l.0 - e0.0).abs().max((l.1 - e0.1).abs()).max((r.0 - e1.0).abs()).max((r.1 - e1.1).abs());
        worst = worst.max((gap - 1e-6).max(0.0));
    }
    let curve = roc_curve_default(&rho1, &rho2).unwrap();
    worst = worst.max(curve.convexity_violation()).max(curve.monotonicity_violation());
    let varying = regimes
        .iter()
        .filter(|pts| {
            let spread = |f: fn(&(f64, f64)) -> f64| {
                let (lo, hi) = pts.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                hi - lo
            };
            !pts.is_empty() && spread(|x| x.0).max(spread(|x| x.1)) > 1e-9
        })
        .count();
    if !(kernel_count_ok && varying == 1) {
        worst = f64::INFINITY;
    }
    finish(2, "qutrit pair continuous, convex, one curved stretch", worst, 1e-9, start, 5.0);
}

#[test]
fn c03_pure_states_meet_fidelity_bound() {
    let start = Instant::now();
    let mut rng = rng(3);
    let grid = beta_grid(256);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let dim = 2 + i % 2;
        let psi: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.random(), rng.random()) - 0.5).collect();
        let phi: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.random(), rng.random()) - 0.5).collect();
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let overlap: Complex64 = psi.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
        let f = overlap.norm() / (norm(&psi) * norm(&phi));
        let rho1 = DensityMatrix::pure(&psi).unwrap();
        let rho2 = DensityMatrix::pure(&phi).unwrap();
        for &b in &grid {
            let e = exact_alpha_at_beta(&rho1, &rho2, b).unwrap();
            worst = worst.max((e - fidelity_lb_alpha(f, b)).abs());
        }
    }
    finish(3, "pure-state tightness of the fidelity bound", worst, 1e-8, start, f64::INFINITY);
}

#[test]
fn c04_sandwich_ordering() {
    let start = Instant::now();
    let mut rng = rng(4);
    let grid = beta_grid(256);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let dim = 2 + i % 4;
        let rho1 = random_density(&mut rng, dim);
        let rho2 = random_density(&mut rng, dim);
        let d = overlap_decomposition(&rho1, &rho2).unwrap();
        let f = fidelity(&rho1, &rho2).unwrap();
        let star = chernoff_s_star(&d);
        let s0s = [0.25, star.s_star, 0.5, 0.75];
        let q0s: Vec<f64> = s0s.iter().map(|&s| d.value(s)).collect();
        for &b in &grid {
            let lb = fidelity_lb_alpha(f, b);
            let ex = exact_alpha_at_beta(&rho1, &rho2, b).unwrap();
            let oa = oaqcb_alpha_at_beta(&d, b).unwrap().0;
            worst = worst.max(lb - ex).max(ex - oa);
            for (&s0, &q0) in s0s.iter().zip(&q0s) {
                worst = worst.max(oa - caqcb_alpha(q0, s0, b).unwrap());
            }
            worst = worst.max(caqcb_alpha(q0s[2], 0.5, b).unwrap() - fidelity_ub_alpha(f, b));
        }
    }
    finish(4, "fidLB <= exact <= OAQCB <= CAQCB, CAQCB(1/2) <= fidUB", worst, 1e-8, start, f64::INFINITY);
}

#[test]
fn c05_hoeffding_saturation() {
    let start = Instant::now();
    let mut rng = rng(5);
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut worst: f64 = 0.0;
    let mut worst_arg: f64 = 0.0;
    for i in 0..20 {
        let dim = 2 + i % 3;
        let rho1 = random_mixed(&mut rng, dim, 0.05);
        let rho2 = random_mixed(&mut rng, dim, 0.05);
        let d = overlap_decomposition(&rho1, &rho2).unwrap();
        let rep = check_hoeffding_saturation(&d, &grid, 1e-6).unwrap();
        worst = worst.max(rep.worst_deviation);
        for row in &rep.rows {
            worst_arg = worst_arg.max((row.argmax - row.p).abs());
        }
    }
    if worst_arg > 1e-3 {
        report(5, "maximizing s within 1e-3 of p", false, &format!("worst {worst_arg:.3e}"));
        worst = f64::INFINITY;
    }
    finish(5, "Hoeffding saturation", worst, 1e-6, start, f64::INFINITY);
}

#[test]
fn c06_stein_endpoints() {
    let start = Instant::now();
    let mut rng = rng(6);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let dim = 2 + i % 4;
        let rho1 = random_mixed(&mut rng, dim, 0.02);
        let rho2 = random_mixed(&mut rng, dim, 0.02);
        let d = overlap_decomposition(&rho1, &rho2).unwrap();
        let (s12, s21) = stein_exponents(&d);
        worst = worst.max((s12 - direct_relative_entropy(&rho1, &rho2)).abs());
        worst = worst.max((s21 - direct_relative_entropy(&rho2, &rho1)).abs());
    }
    finish(6, "Stein endpoints vs direct relative entropies", worst, 1e-10, start, f64::INFINITY);
}

#[test]
fn c07_log_convexity() {
    let start = Instant::now();
    let mut rng = rng(7);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let dim = 2 + i % 4;
        let d = overlap_decomposition(&random_density(&mut rng, dim), &random_density(&mut rng, dim)).unwrap();
        worst = worst.max(-logconvexity_check(&d, 99, 1e-9).min_second_difference);
    }
    for &(n1, n2) in &[(0.2, 1.0), (0.5, 0.6), (1.0, 3.0), (0.1, 0.1)] {
        let g1 = GaussianState::thermal(n1).unwrap();
        let g2 = GaussianState::thermal(n2).unwrap().displaced(&[0.3, -0.2]).unwrap();
        let e = gaussian_qs_evaluator(&g1, &g2).unwrap();
        worst = worst.max(-logconvexity_check(&e, 99, 1e-9).min_second_difference);
    }
    finish(7, "log-convexity of Q_s", worst.max(0.0), 1e-9, start, f64::INFINITY);
}

fn geometric_q(n1: f64, n2: f64, s: f64) -> f64 {
    let x1 = n1 / (1.0 + n1);
    let x2 = n2 / (1.0 + n2);
    (1.0 - x2).powf(s) * (1.0 - x1).powf(1.0 - s) / (1.0 - x2.powf(s) * x1.powf(1.0 - s))
}

#[test]
fn c08_gaussian_against_closed_form_and_fock() {
    let start = Instant::now();
    let nbars = [0.2, 0.4, 0.6, 0.8, 1.0];
    let ss: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let fock: Vec<DensityMatrix> = nbars
        .iter()
        .map(|&n| gaussian_to_fock(&GaussianState::thermal(n).unwrap(), 80).unwrap().to_density())
        .collect();
    let mut worst: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    for (i, &n1) in nbars.iter().enumerate() {
        for (j, &n2) in nbars.iter().enumerate() {
            let g1 = GaussianState::thermal(n1).unwrap();
            let g2 = GaussianState::thermal(n2).unwrap();
            let d = overlap_decomposition(&fock[i], &fock[j]).unwrap();
            for &s in &ss {
                let q = gaussian_q_s(&g1, &g2, s).unwrap();
                worst = worst.max((q - geometric_q(n1, n2, s)).abs());
                worst = worst.max((q - q_s(&d, s).unwrap()).abs());
                let h = 1e-5;
                let fd = -(gaussian_q_s(&g1, &g2, s + h).unwrap().ln() - gaussian_q_s(&g1, &g2, s - h).unwrap().ln())
                    / (2.0 * h);
                worst_fd = worst_fd.max((gaussian_q_s_logderiv(&g1, &g2, s).unwrap() - fd).abs());
            }
        }
    }
    if worst_fd > 1e-5 {
        report(8, "log-derivative vs finite differences", false, &format!("worst {worst_fd:.3e}"));
        worst = f64::INFINITY;
    }
    finish(8, "Gaussian Q_s vs closed form and cutoff-80 truncation", worst, 1e-6, start, 30.0);
}

#[test]
fn c09_two_mode_scenario() {
    let start = Instant::now();
    let g1 = tmsv_through_thermal_loss(4.0, 0.7, 0.4).unwrap();
    let g2 = tmsv_through_thermal_loss(4.0, 0.3, 0.6).unwrap();
    let qs = gaussian_qs_evaluator(&g1, &g2).unwrap();
    let f = gaussian_fidelity_truncated(&g1, &g2, 64).unwrap().fidelity;
    let star = chernoff_s_star(&qs);
    let (s12, s21) = stein_exponents(&qs);
    let (s12_bits, s21_bits) = (s12 / std::f64::consts::LN_2, s21 / std::f64::consts::LN_2);
    let grid = uniform_grid(257);

    let specs = [
        BoundSpec::FidelityLower { fidelity: f },
        BoundSpec::FidelityUpper { fidelity: f },
        BoundSpec::Caqcb { q_s0: star.q_star, s0: star.s_star },
        BoundSpec::Oaqcb { qs: &qs },
        BoundSpec::QreLowerAlpha { s21_bits },
        BoundSpec::QreLowerBeta { s12_bits },
    ];
    let mut worst: f64 = 0.0;
    for spec in &specs {
        let curve = bound_curve(spec, &grid).unwrap();
        if curve.len() != grid.len() || curve.points.iter().any(|p| !p.alpha.is_finite() || !p.beta.is_finite()) {
            worst = f64::INFINITY;
        }
    }

    let s0s = [0.25, star.s_star, 0.5, 0.75];
    let q0s: Vec<f64> = s0s.iter().map(|&s| qs.value(s)).collect();
    for &b in &grid {
        let oa = oaqcb_alpha_at_beta(&qs, b).unwrap().0;
        worst = worst.max(fidelity_lb_alpha(f, b) - oa);
        worst = worst.max(qre_lb_alpha(s21_bits, b) - oa);
        for (&s0, &q0) in s0s.iter().zip(&q0s) {
            worst = worst.max(oa - caqcb_alpha(q0, s0, b).unwrap());
        }
        worst = worst.max(caqcb_alpha(q0s[2], 0.5, b).unwrap() - fidelity_ub_alpha(f, b));
    }
    for i in 0..=10_000 {
        let (a, b) = oaqcb_point(&qs, i as f64 / 10_000.0).unwrap();
        let out = |x: f64| (-x).max(x - 1.0).max(0.0);
        worst = worst.max(out(a)).max(out(b));
    }
    let (a_star, b_star) = oaqcb_point(&qs, star.s_star).unwrap();
    worst = worst.max((caqcb_alpha(star.q_star, star.s_star, b_star).unwrap() - a_star).abs());

    // The relative-entropy bound beats the fidelity bound somewhere near an
    // axis exactly when the entropies are finite.
    let beats = |s_bits: f64, fid: f64| grid.iter().any(|&b| qre_lb_alpha(s_bits, b) > fidelity_lb_alpha(fid, b) + 1e-12);
    let finite_ok = s21.is_finite() && beats(s21_bits, f);
    let rho1 = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
    let rho2 = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
    let div = relative_entropies(&overlap_decomposition(&rho1, &rho2).unwrap(), EntropyUnit::Bits);
    let divergent_ok = div.s21.is_infinite() && !beats(div.s21, fidelity(&rho1, &rho2).unwrap());
    if !(finite_ok && divergent_ok) {
        worst = f64::INFINITY;
    }
    finish(9, "two-mode lossy-channel scenario", worst, 1e-8, start, 60.0);
}

#[test]
fn c10_ncopy_consistency() {
    let start = Instant::now();
    let mut rng = rng(10);
    let mut worst_point: f64 = 0.0;
    let mut worst_law: f64 = 0.0;
    for _ in 0..20 {
        let rho1 = random_density(&mut rng, 2);
        let rho2 = random_density(&mut rng, 2);
        let d = overlap_decomposition(&rho1, &rho2).unwrap();
        let f = fidelity(&rho1, &rho2).unwrap();
        for n in [2u32, 3] {
            let t1 = rho1.tensor_power(n as usize);
            let t2 = rho2.tensor_power(n as usize);
            let dn = overlap_decomposition(&t1, &t2).unwrap();
            worst_law = worst_law.max((fidelity(&t1, &t2).unwrap() - ncopy_fidelity(f, n)).abs());
            for i in 1..20 {
                let p = i as f64 / 20.0;
                let (a, b) = oaqcb_ncopy_point(&d, p, n).unwrap();
                let (ea, eb) = oaqcb_point(&dn, p).unwrap();
                worst_point = worst_point.max((a - ea).abs()).max((b - eb).abs());
                worst_law = worst_law.max((q_s(&dn, p).unwrap() - ncopy_qs(q_s(&d, p).unwrap(), n)).abs());
            }
        }
    }
    if worst_law > 1e-10 {
        report(10, "fidelity and Q_s power laws", false, &format!("worst {worst_law:.3e}"));
        worst_point = f64::INFINITY;
    }
    finish(10, "n-copy bound from single-copy data", worst_point, 1e-9, start, f64::INFINITY);
}

/// `α` of one three-copy rule at `β`, by bisection on the single-copy weight.
fn rule_alpha_at_beta(f1: f64, rule: ThreeCopyRule, beta: f64) -> f64 {
    let at = |p: f64| nonadaptive_three_copy(f1, p, rule).unwrap();
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    if at(hi).1 <= beta {
        return at(hi).0;
    }
    if at(lo).1 >= beta {
        return at(lo).0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid).1 < beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi)).0
}

#[test]
fn c11_adaptive_identity_and_nonadaptive_envelope() {
    let start = Instant::now();
    let mut rng = rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p0 = rng.random_range(0.01..0.99);
        let f1: f64 = rng.random_range(0.0..0.999);
        let f2: f64 = rng.random_range(0.0..0.999);
        let (a, b) = adaptive_sequence_errors(p0, f1, f2).unwrap();
        let (ea, eb) = fidelity_lb_point(f1 * f2, p0).unwrap();
        worst = worst.max((a - ea).abs()).max((b - eb).abs());
    }
    let mut worst_env: f64 = 0.0;
    for b in beta_grid(257) {
        let case_a = rule_alpha_at_beta(0.9, ThreeCopyRule::A, b);
        let case_b = rule_alpha_at_beta(0.9, ThreeCopyRule::B, b);
        let case_c = rule_alpha_at_beta(0.9, ThreeCopyRule::C, b);
        worst_env = worst_env.max(case_a.min(case_c) - case_b);
    }
    if worst_env > 1e-9 {
        report(11, "majority vote never beats both other rules", false, &format!("worst {worst_env:.3e}"));
        worst = f64::INFINITY;
    }
    finish(11, "adaptive two-step identity", worst, 1e-12, start, f64::INFINITY);
}

#[test]
fn c12_relative_entropy_bounds() {
    let start = Instant::now();
    let mut rng = rng(12);
    let grid = beta_grid(64);
    let mut worst: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for i in 0..30 {
        let dim = 2 + i % 3;
        let rho1 = random_density(&mut rng, dim);
        let rho2 = random_density(&mut rng, dim);
        let d = overlap_decomposition(&rho1, &rho2).unwrap();
        let ent = relative_entropies(&d, EntropyUnit::Bits);
        let f2 = fidelity(&rho1, &rho2).unwrap().powi(2);
        worst_f = worst_f.max((-ent.s12).exp2() - f2).max((-ent.s21).exp2() - f2);
        for &x in &grid {
            worst = worst.max(qre_lb_alpha(ent.s21, x) - exact_alpha_at_beta(&rho1, &rho2, x).unwrap());
            worst = worst.max(qre_lb_beta(ent.s12, x) - exact_beta_at_alpha(&rho1, &rho2, x).unwrap());
        }
    }
    let pure = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
    let mixed = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
    let ent = relative_entropies(&overlap_decomposition(&pure, &mixed).unwrap(), EntropyUnit::Bits);
    let trivial = ent.s21.is_infinite()
        && bound_curve(&BoundSpec::QreLowerAlpha { s21_bits: ent.s21 }, &grid)
            .unwrap()
            .points
            .iter()
            .all(|p| p.alpha == 0.0);
    if worst_f > 1e-9 {
        report(12, "2^-S <= F^2", false, &format!("worst {worst_f:.3e}"));
        worst = f64::INFINITY;
    }
    if !trivial {
        worst = f64::INFINITY;
    }
    finish(12, "relative-entropy bounds", worst.max(0.0), 1e-8, start, f64::INFINITY);
}
