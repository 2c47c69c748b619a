//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`) before asserting at the
//! stated tolerance.

use num_complex::Complex64;
use std::f64::consts::PI;

use nlslab::catalog::{eval_exact, exact_period, solve_r_alpha, ExactSolution};
use nlslab::classifier::{classify, GroundStateThresholds, InvariantFacts, VerdictStatus};
use nlslab::functionals::{
    energy, grad_norm_sqr, invariants, lp_norm_pow, variance, virial_p_tilde,
};
use nlslab::grid::{BackgroundKind, Field1D, Grid1D};
use nlslab::integrator::{conservation_drift, evolve, step, EvolveConfig};
use nlslab::model::{Family, ModelSpec};
use nlslab::scenario::{detect_period, eval_catalog_scaled, pde_residual};
use nlslab::virial::{
    appendix_terms, pohozaev_residuals, rhs_biharmonic, rhs_cubic_quintic, rhs_dnls,
    rhs_for_model, rhs_gp_nz, rhs_gp_nz_expanded_cubic, rhs_gp_nz_reduced_quintic_1d,
    rhs_gp_nz_regrouped_quintic_2d, rhs_log_nls, rhs_power_nls, seeded_random_field,
};

fn grid(l: f64, n: usize) -> Grid1D {
    Grid1D::new(l, n).unwrap()
}

fn report(criterion: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion:02} {tag} - {detail}");
    assert!(pass, "criterion {criterion}: {detail}");
}

#[test]
fn criterion_01_satsuma_yajima_invariants() {
    let start = std::time::Instant::now();
    let g = grid(20.0, 2048);
    let model = ModelSpec::power_nls(-1.0, 2.0, 1).unwrap();
    let f = eval_exact(&ExactSolution::SatsumaYajima, 0.0, &g).unwrap();
    let inv = invariants(&f, &model).unwrap();
    let m = inv.mass.unwrap();
    let e = inv.energy.unwrap();
    let p = inv.momentum.unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let ok = (m - 16.0).abs() < 1e-8
        && (e + 112.0 / 3.0).abs() < 1e-6
        && p.abs() < 1e-10
        && elapsed < 1.0;
    report(
        1,
        ok,
        &format!("SY M = {m:.12} E = {e:.12} P = {p:.3e} in {elapsed:.3}s"),
    );
}

#[test]
fn criterion_02_kuznetsov_ma_invariants() {
    let g = grid(25.0, 2048);
    let f = eval_exact(&ExactSolution::KuznetsovMa { a: 1.0 }, 0.0, &g).unwrap();
    let model = ModelSpec::gross_pitaevskii(-1.0, 2.0, 1).unwrap();
    let inv = invariants(&f, &model).unwrap();
    let m = inv.mass_nz.unwrap();
    let e = inv.energy_nz.unwrap();
    let p = inv.momentum_nz.unwrap();
    let s2 = 2.0_f64.sqrt();
    let ok = (m - 4.0 * s2).abs() < 1e-6
        && (e + 16.0 * s2 / 3.0).abs() < 1e-6
        && p.abs() < 1e-8;
    report(
        2,
        ok,
        &format!(
            "KM(a=1) M_nz = {m:.12} (want {:.12}), E_nz = {e:.12} (stated {:.12}), P_nz = {p:.3e}",
            4.0 * s2,
            -16.0 * s2 / 3.0
        ),
    );
}

#[test]
fn criterion_03_peregrine_invariants_with_tail_correction() {
    let g = grid(400.0, 16384);
    let f = eval_exact(&ExactSolution::Peregrine, 0.0, &g).unwrap();
    let model = ModelSpec::gross_pitaevskii(-1.0, 2.0, 1).unwrap();
    let inv = invariants(&f, &model).unwrap();
    let m = inv.mass_nz.unwrap();
    let e = inv.energy_nz.unwrap();
    let p = inv.momentum_nz.unwrap();
    let ok = m.abs() < 1e-3 && e.abs() < 1e-3 && p.abs() < 1e-3;
    report(
        3,
        ok,
        &format!("Peregrine M_nz = {m:.3e} E_nz = {e:.3e} P_nz = {p:.3e}"),
    );
}

#[test]
fn criterion_04_power_nls_virial_identity_on_sy() {
    let g = grid(20.0, 2048);
    let model = ModelSpec::power_nls(-1.0, 2.0, 1).unwrap();
    let dt = 1e-5;
    let mut worst = 0.0f64;
    for t in [0.0, 0.1, PI / 8.0] {
        let at = |tt: f64| eval_exact(&ExactSolution::SatsumaYajima, tt, &g).unwrap();
        let lhs = (virial_p_tilde(&at(t + dt)).unwrap() - virial_p_tilde(&at(t - dt)).unwrap())
            / (2.0 * dt);
        let rhs = rhs_power_nls(&at(t), &model).unwrap();
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    report(4, worst < 1e-5, &format!("SY virial identity max residual {worst:.3e}"));
}

#[test]
fn criterion_05_appendix_closure() {
    let model = ModelSpec::gross_pitaevskii(-1.0, 2.0, 1).unwrap();
    let dt = 1e-5;
    let closure = |sol: &ExactSolution, t: f64, g: &Grid1D| -> f64 {
        let at = |tt: f64| eval_exact(sol, tt, g).unwrap().stokes_phase_removed();
        let (i, ii, iii) = appendix_terms(&at(t - dt), &at(t), &at(t + dt), &model, dt).unwrap();
        (i + ii + iii).abs() / i.abs().max(ii.abs()).max(iii.abs()).max(1.0)
    };
    let g = grid(25.0, 2048);
    let km = ExactSolution::KuznetsovMa { a: 1.0 };
    let worst_km = [0.1, 0.3, 0.7]
        .iter()
        .map(|&t| closure(&km, t, &g))
        .fold(0.0, f64::max);
    let gp = grid(400.0, 16384);
    let worst_p = closure(&ExactSolution::Peregrine, 0.2, &gp);
    let ok = worst_km < 1e-6 && worst_p < 1e-3;
    report(
        5,
        ok,
        &format!("closure residual KM {worst_km:.3e} (tol 1e-6), Peregrine {worst_p:.3e} (tol 1e-3)"),
    );
}

#[test]
fn criterion_06_lemma_rhs_equivalences() {
    let g = grid(20.0, 512);
    let mut worst_cubic = 0.0f64;
    let mut worst_quintic = 0.0f64;
    for seed in 0..100u64 {
        let f = seeded_random_field(&g, BackgroundKind::Stokes, seed, 0.5);
        for n in [1u32, 2] {
            let m2 = ModelSpec::gross_pitaevskii(-1.0, 2.0, n).unwrap();
            let a = rhs_gp_nz(&f, &m2).unwrap();
            let b = rhs_gp_nz_expanded_cubic(&f, &m2).unwrap();
            worst_cubic = worst_cubic.max((a - b).abs() / a.abs().max(1.0));
        }
        let m41 = ModelSpec::gross_pitaevskii(-1.0, 4.0, 1).unwrap();
        let a = rhs_gp_nz(&f, &m41).unwrap();
        let b = rhs_gp_nz_reduced_quintic_1d(&f, &m41).unwrap();
        worst_quintic = worst_quintic.max((a - b).abs() / a.abs().max(1.0));
        let m42 = ModelSpec::gross_pitaevskii(-1.0, 4.0, 2).unwrap();
        let a = rhs_gp_nz(&f, &m42).unwrap();
        let b = rhs_gp_nz_regrouped_quintic_2d(&f, &m42).unwrap();
        worst_quintic = worst_quintic.max((a - b).abs() / a.abs().max(1.0));
    }
    println!("ACCEPTANCE 06a {} - p=2 expanded vs binomial, max deviation {worst_cubic:.3e}",
        if worst_cubic < 1e-10 { "PASS" } else { "FAIL" });
    println!("ACCEPTANCE 06b {} - p=4 regrouped vs binomial, max deviation {worst_quintic:.3e}",
        if worst_quintic < 1e-10 { "PASS" } else { "FAIL" });
    let ok = worst_cubic < 1e-10 && worst_quintic < 1e-10;
    report(
        6,
        ok,
        &format!("RHS equivalences: cubic {worst_cubic:.3e}, quintic {worst_quintic:.3e} (tol 1e-10)"),
    );
}

#[test]
fn criterion_07_defocusing_monotonicity() {
    let g = grid(20.0, 512);
    let model = ModelSpec::power_nls(1.0, 2.0, 1).unwrap();
    let f0 = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
        Complex64::new((-x * x / 2.0).exp(), 0.0)
    })
    .unwrap();
    let cfg = EvolveConfig::new(1e-3, 1.0).unwrap().with_stride(10);
    let traj = evolve(&f0, &model, &cfg).unwrap();
    let ok = traj.len() >= 100 && traj.monotone_fraction == 1.0;
    report(
        7,
        ok,
        &format!(
            "defocusing virial monotone_fraction = {} over {} samples",
            traj.monotone_fraction,
            traj.len()
        ),
    );
}

fn sy_period_error(dt: f64) -> (f64, f64) {
    let g = grid(20.0, 2048);
    let model = ModelSpec::power_nls(-1.0, 2.0, 1).unwrap();
    let f0 = eval_exact(&ExactSolution::SatsumaYajima, 0.0, &g).unwrap();
    let cfg = EvolveConfig::new(dt, PI / 4.0).unwrap().with_stride(500);
    let traj = evolve(&f0, &model, &cfg).unwrap();
    let t_final = *traj.times.last().unwrap();
    let target = eval_exact(&ExactSolution::SatsumaYajima, t_final, &g).unwrap();
    let err = traj.final_field.as_ref().unwrap().l2_relative_distance(&target);
    let drift = conservation_drift(&traj, "m").unwrap();
    (err, drift)
}

#[test]
fn criterion_08_evolution_fidelity() {
    let start = std::time::Instant::now();
    let (err, drift) = sy_period_error(1e-4);
    let (err_half, _) = sy_period_error(5e-5);
    let elapsed = start.elapsed().as_secs_f64();
    let ratio = err / err_half;
    let ok = err < 1e-4 && drift < 1e-8 && (3.2..=4.8).contains(&ratio) && elapsed < 60.0;
    report(
        8,
        ok,
        &format!("SY one period: L2 err {err:.3e}, mass drift {drift:.3e}, dt-halving ratio {ratio:.2}, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_09_ground_state() {
    let g = grid(20.0, 1024);
    // iterative matches the closed form
    let gs = nlslab::ground_state::ground_state_imag_time(2.0, 1, 1.0, &g, 1e-10).unwrap();
    let exact = nlslab::ground_state::ground_state_1d_exact(2.0, 1.0, &g).unwrap();
    let sup = gs.profile.sup_distance(&exact.profile);
    // Pohozaev residuals across powers
    let mut worst_poho = 0.0f64;
    for p in [1.0, 2.0, 3.0, 4.0, 6.0] {
        let q = nlslab::ground_state::ground_state_imag_time(p, 1, 1.0, &g, 1e-10).unwrap();
        let (r1, r2) = pohozaev_residuals(&q.profile, p, 1.0).unwrap();
        worst_poho = worst_poho.max(r1.abs()).max(r2.abs());
    }
    // zero energy at the mass-critical power
    let q4 = nlslab::ground_state::ground_state_1d_exact(4.0, 1.0, &g).unwrap();
    let e4 = energy(&q4.profile, &ModelSpec::power_nls(-1.0, 4.0, 1).unwrap())
        .unwrap()
        .unwrap();
    // consequence identity ||grad Q||^2 = (np/(2(p+2))) ||Q||_{p+2}^{p+2}
    let p = 2.0;
    let q = nlslab::ground_state::ground_state_1d_exact(p, 1.0, &g).unwrap();
    let lhs = grad_norm_sqr(&q.profile).unwrap();
    let rhs = (1.0 * p / (2.0 * (p + 2.0))) * lp_norm_pow(&q.profile, p + 2.0).unwrap();
    let cons = (lhs - rhs).abs() / rhs.abs().max(1.0);
    let ok = sup < 1e-6 && worst_poho < 1e-6 && e4.abs() < 1e-8 && cons < 1e-6;
    report(
        9,
        ok,
        &format!("ground state: sup err {sup:.3e}, Pohozaev {worst_poho:.3e}, E(p=4) {e4:.3e}, consequence {cons:.3e}"),
    );
}

#[test]
fn criterion_10_mass_critical_variance_law() {
    let g = grid(20.0, 1024);
    let model = ModelSpec::power_nls(-1.0, 4.0, 1).unwrap();
    let f0 = eval_exact(&ExactSolution::StandingWave { omega: 1.0, p: 4.0 }, 0.0, &g).unwrap();
    let cfg = EvolveConfig::new(2e-5, 0.4).unwrap().with_stride(400);
    let traj = evolve(&f0, &model, &cfg).unwrap();
    let v: Vec<f64> = traj
        .reports
        .iter()
        .map(|r| r.variance.unwrap())
        .collect();
    let v_drift = v
        .iter()
        .map(|x| (x - v[0]).abs())
        .fold(0.0, f64::max)
        / v[0].abs().max(1.0);
    let p_tilde_max = traj.virial.iter().map(|x| x.abs()).fold(0.0, f64::max);
    // V(t) = V(0) + 4 P~(0) t with P~(0) = 0 on the standing wave
    let ok = v_drift < 1e-6 && p_tilde_max < 1e-8;
    report(
        10,
        ok,
        &format!("variance drift {v_drift:.3e}, max |P~| {p_tilde_max:.3e}"),
    );
}

#[test]
fn criterion_11_scaled_sy_period() {
    let lambda = 2.0;
    let g = grid(10.0, 2048);
    let model = ModelSpec::power_nls(-1.0, 2.0, 1).unwrap();
    let f0 = eval_catalog_scaled(&ExactSolution::SatsumaYajima, 0.0, &g, lambda).unwrap();
    let cfg = EvolveConfig::new(2e-5, 0.65).unwrap().with_stride(10);
    let traj = evolve(&f0, &model, &cfg).unwrap();
    let period = detect_period(&traj.times, &traj.virial).unwrap();
    let expected = PI / 16.0;
    let rel = (period - expected).abs() / expected;
    report(
        11,
        rel < 1e-3,
        &format!("scaled SY measured period {period:.6} vs {expected:.6} (rel {rel:.3e})"),
    );
}

/// 1-D Hamiltonian quadrature oracle for the radial ODE orbit period:
/// `T = 2 int_{r_min}^{r_max} dr / sqrt(2 (E - V))` with
/// `V(r) = 1/(2 r^2) + 2 ln r` on the focusing branch.
fn r_alpha_period_quadrature(r0: f64) -> f64 {
    let v = |r: f64| 0.5 / (r * r) + 2.0 * r.ln();
    let e = v(r0);
    let r_star = 1.0 / 2.0_f64.sqrt();
    // the other turning point brackets the well on the opposite side of r*
    let (mut lo, mut hi) = if r0 > r_star { (1e-6, r_star) } else { (r_star, 1e6) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let above = v(mid) > e;
        if r0 > r_star {
            if above { lo = mid } else { hi = mid }
        } else if above {
            hi = mid
        } else {
            lo = mid
        }
    }
    let r_other = 0.5 * (lo + hi);
    let (r1, r2) = if r0 < r_other { (r0, r_other) } else { (r_other, r0) };
    // sin substitution removes the inverse-sqrt endpoint singularities
    let mid = 0.5 * (r1 + r2);
    let half = 0.5 * (r2 - r1);
    let n = 400_000usize;
    let mut acc = 0.0;
    for j in 0..n {
        let theta = -PI / 2.0 + PI * (j as f64 + 0.5) / n as f64;
        let r = mid + half * theta.sin();
        let de = e - v(r);
        if de > 0.0 {
            acc += half * theta.cos() / (2.0 * de).sqrt();
        }
    }
    2.0 * acc * PI / n as f64
}

#[test]
fn criterion_12_log_nls() {
    let g = grid(20.0, 2048);
    let r_gausson = pde_residual(&ExactSolution::Gausson { omega: 1.0 }, 0.1, &g).unwrap();
    // orbit period against the quadrature oracle
    let alpha = Complex64::new(1.2, 0.0);
    let orbit = solve_r_alpha(alpha, 1.0, 60.0, 1e-12).unwrap();
    let t_ode = orbit.period.unwrap();
    let t_quad = r_alpha_period_quadrature(1.2);
    let period_err = (t_ode - t_quad).abs() / t_quad;
    let breather = ExactSolution::LogBreather { alpha };
    let r_breather = pde_residual(&breather, 0.15, &g).unwrap();
    // virial identity along the breather
    let model = ModelSpec::log_nls(-1.0, 1).unwrap();
    let dt = 1e-5;
    let mut worst = 0.0f64;
    for t in [0.1, 0.6] {
        let at = |tt: f64| eval_exact(&breather, tt, &g).unwrap();
        let lhs = (virial_p_tilde(&at(t + dt)).unwrap() - virial_p_tilde(&at(t - dt)).unwrap())
            / (2.0 * dt);
        let rhs = rhs_log_nls(&at(t), &model).unwrap();
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    let ok = r_gausson < 1e-8 && period_err < 1e-6 && r_breather < 1e-6 && worst < 1e-5;
    report(
        12,
        ok,
        &format!("Gausson residual {r_gausson:.3e}, period err {period_err:.3e}, breather residual {r_breather:.3e}, virial {worst:.3e}"),
    );
}

#[test]
fn criterion_13_dnls() {
    let g = grid(30.0, 1024);
    let model = ModelSpec::derivative_nls(1.0).unwrap();
    let f0 = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
        Complex64::new(1.0 / x.cosh(), 0.0)
    })
    .unwrap();
    let cfg = EvolveConfig::new(1e-4, 0.5).unwrap().with_stride(100);
    let traj = evolve(&f0, &model, &cfg).unwrap();
    let h_drift = conservation_drift(&traj, "dnls_h").unwrap();
    // FD vs formula for the first-moment rate along the trajectory
    let f = traj.final_field.clone().unwrap();
    let dt = 1e-4;
    let scfg = EvolveConfig::new(dt, dt).unwrap();
    let fp = step(&f, &model, dt, &scfg).unwrap();
    let fm = step(&f, &model, -dt, &scfg).unwrap();
    let lhs = (nlslab::virial::dnls_v_tilde(&fp).unwrap()
        - nlslab::virial::dnls_v_tilde(&fm).unwrap())
        / (2.0 * dt);
    let rhs = rhs_dnls(&f, &model).unwrap();
    let res = (lhs - rhs).abs() / rhs.abs().max(1.0);
    let ok = h_drift < 1e-6 && res < 1e-4;
    report(13, ok, &format!("DNLS H drift {h_drift:.3e}, V~' residual {res:.3e}"));
}

#[test]
fn criterion_14_biharmonic_and_cubic_quintic() {
    let g = grid(30.0, 1024);
    // FD vs formula along simulated trajectories
    let fd_residual = |model: &ModelSpec, f0: &Field1D| -> f64 {
        let cfg = EvolveConfig::new(1e-4, 0.1).unwrap().with_stride(1000);
        let traj = evolve(f0, model, &cfg).unwrap();
        let f = traj.final_field.clone().unwrap();
        let dt = 1e-5;
        let scfg = EvolveConfig::new(dt, dt).unwrap();
        let fp = step(&f, model, dt, &scfg).unwrap();
        let fm = step(&f, model, -dt, &scfg).unwrap();
        let lhs =
            (virial_p_tilde(&fp).unwrap() - virial_p_tilde(&fm).unwrap()) / (2.0 * dt);
        let rhs = rhs_for_model(&f, model).unwrap();
        (lhs - rhs).abs() / rhs.abs().max(1.0)
    };
    // wide profile: the biharmonic group velocity grows like k^3, so narrow
    // data radiates to the box edge well before t = 0.1
    let gauss = Field1D::from_fn(g, BackgroundKind::Zero, 0.0, |x| {
        Complex64::new((-x * x / 8.0).exp(), 0.0)
    })
    .unwrap();
    let bi = ModelSpec::biharmonic(1.0, 1.0, 2.0, 1).unwrap();
    let cq = ModelSpec::cubic_quintic(1.0, 1.0, 1).unwrap();
    let res_bi = fd_residual(&bi, &gauss);
    let res_cq = fd_residual(&cq, &gauss);
    // sign properties on seeded random fields: biharmonic rate > 0 for
    // epsilon = +1, mu >= 0; cubic-quintic n=1 rate > 0 when lambda1 E_1 > 0
    let mut signs_ok = true;
    for seed in 0..100u64 {
        let f = seeded_random_field(&g, BackgroundKind::Zero, seed, 1.0);
        signs_ok &= rhs_biharmonic(&f, &bi).unwrap() > 0.0;
        let e1 = energy(&f, &cq).unwrap().unwrap();
        if e1 > 0.0 {
            signs_ok &= rhs_cubic_quintic(&f, &cq).unwrap() > 0.0;
        }
    }
    let ok = res_bi < 1e-4 && res_cq < 1e-4 && signs_ok;
    report(
        14,
        ok,
        &format!("virial residual biharmonic {res_bi:.3e}, cubic-quintic {res_cq:.3e}, signs {signs_ok}"),
    );
}

fn facts(model: ModelSpec, f: impl FnOnce(&mut InvariantFacts)) -> InvariantFacts {
    let mut x = InvariantFacts::new(model);
    f(&mut x);
    x
}

fn rule_trigger_cases() -> Vec<(InvariantFacts, &'static str)> {
    let power = |eps: f64, p: f64, n: u32| ModelSpec::power_nls(eps, p, n).unwrap();
    let gp = |eps: f64, p: f64, n: u32| ModelSpec::gross_pitaevskii(eps, p, n).unwrap();
    let th = GroundStateThresholds { e_qstar: 1.0, m_qstar: 4.0, grad_qstar: 1.2 };
    vec![
        (facts(power(1.0, 2.0, 1), |_| {}), "R1"),
        (facts(power(-1.0, 2.0, 1), |f| f.momentum = Some(0.7)), "R2"),
        (
            facts(power(-1.0, 2.0, 1), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(3.0);
            }),
            "R3",
        ),
        (
            facts(power(-1.0, 6.0, 1), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(-1.0);
            }),
            "R3",
        ),
        (
            facts(power(-1.0, 4.0, 1), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(0.0);
                f.p_tilde0 = Some(0.5);
            }),
            "R4",
        ),
        (
            facts(power(-1.0, 4.0, 1), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(0.0);
                f.p_tilde0 = Some(0.0);
                f.l2_norm = Some(1.0);
                f.q_l2_norm = Some(1.862);
            }),
            "R4",
        ),
        (
            facts(power(-1.0, 6.0, 1), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(0.01);
                f.mass = Some(1.0);
                f.grad_l2_at_0 = Some(0.3);
                f.thresholds = Some(th);
            }),
            "R5",
        ),
        (
            facts(power(-1.0, 3.0, 1), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(-1.0);
                f.mass_small = true;
                f.decay_certificate = true;
                f.eps_small = Some(0.1);
                f.l2_norm = Some(0.05);
            }),
            "R6",
        ),
        (
            facts(gp(-1.0, 2.0, 1), |f| {
                f.energy = Some(3.0);
                f.mass = Some(2.0);
            }),
            "R7",
        ),
        (
            facts(gp(-1.0, 2.0, 2), |f| {
                f.energy = Some(0.5);
                f.mass = Some(1.0);
            }),
            "R7",
        ),
        (
            facts(gp(-1.0, 4.0, 1), |f| {
                f.energy = Some(-1.0);
                f.mass = Some(1.0);
            }),
            "R7",
        ),
        (
            facts(gp(1.0, 4.0, 2), |f| {
                f.energy = Some(1.0);
                f.mass = Some(0.5);
            }),
            "R7",
        ),
        (
            facts(ModelSpec::cubic_quintic(1.0, 0.5, 1).unwrap(), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(-2.0);
            }),
            "R8",
        ),
        (
            facts(ModelSpec::cubic_quintic(-1.0, -0.5, 2).unwrap(), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(1.0);
            }),
            "R8",
        ),
        (
            facts(ModelSpec::cubic_quintic(-1.0, -0.5, 3).unwrap(), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(10.0);
                f.mass = Some(1.0);
            }),
            "R8",
        ),
        (
            facts(ModelSpec::cubic_quintic(1.0, 0.5, 3).unwrap(), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(-1.0);
                f.p_tilde0 = Some(0.3);
            }),
            "R8",
        ),
        (facts(ModelSpec::biharmonic(1.0, 0.5, 2.0, 1).unwrap(), |_| {}), "R9"),
        (
            facts(ModelSpec::biharmonic(-1.0, -0.5, 2.0, 1).unwrap(), |f| {
                f.energy = Some(1.0);
            }),
            "R9",
        ),
        (facts(ModelSpec::derivative_nls(-1.0).unwrap(), |f| f.h = Some(-2.0)), "R10"),
        (facts(ModelSpec::derivative_nls(1.0).unwrap(), |f| f.h = Some(2.0)), "R10"),
        (facts(ModelSpec::log_nls(1.0, 1).unwrap(), |_| {}), "R11"),
    ]
}

fn catalog_breather_facts() -> Vec<(InvariantFacts, &'static str)> {
    let s2 = 2.0_f64.sqrt();
    vec![
        (
            facts(ModelSpec::power_nls(-1.0, 2.0, 1).unwrap(), |f| {
                f.momentum = Some(0.0);
                f.energy = Some(-112.0 / 3.0);
                f.mass = Some(16.0);
            }),
            "satsuma-yajima",
        ),
        (
            facts(ModelSpec::gross_pitaevskii(-1.0, 2.0, 1).unwrap(), |f| {
                f.momentum = Some(0.0);
                f.mass = Some(4.0 * s2);
                f.energy = Some(-8.0 * s2 / 3.0 - 4.0 * s2);
            }),
            "kuznetsov-ma",
        ),
        (
            facts(ModelSpec::gross_pitaevskii(-1.0, 2.0, 1).unwrap(), |f| {
                f.momentum = Some(0.0);
                f.mass = Some(0.0);
                f.energy = Some(0.0);
            }),
            "peregrine",
        ),
        (facts(ModelSpec::log_nls(-1.0, 1).unwrap(), |_| {}), "gausson/log-breather"),
    ]
}

#[test]
fn criterion_15_classifier() {
    let cases = rule_trigger_cases();
    let mut ok = cases.len() >= 15;
    let mut detail = String::new();
    for (f, rule) in &cases {
        let v = classify(f).unwrap();
        if v.status != VerdictStatus::Precluded || &v.rule != rule {
            ok = false;
            detail = format!("expected {rule}, got {:?}/{}", v.status, v.rule);
        }
    }
    // no catalog breather is ever Precluded
    for (f, name) in &catalog_breather_facts() {
        let v = classify(f).unwrap();
        if v.status == VerdictStatus::Precluded {
            ok = false;
            detail = format!("{name} classified Precluded");
        }
    }
    // verdict stability across the tau0 range
    for tau0 in [1e-11, 1e-9, 1e-7] {
        for (f, rule) in &mut rule_trigger_cases() {
            f.tau0 = tau0;
            let v = classify(f).unwrap();
            if v.status != VerdictStatus::Precluded || &v.rule != *rule {
                ok = false;
                detail = format!("tau0 = {tau0:.0e} changed the verdict for {rule}");
            }
        }
        for (f, name) in &mut catalog_breather_facts() {
            f.tau0 = tau0;
            if classify(f).unwrap().status == VerdictStatus::Precluded {
                ok = false;
                detail = format!("tau0 = {tau0:.0e} precluded {name}");
            }
        }
    }
    report(
        15,
        ok,
        &format!(
            "{} rule-trigger cases, catalog breathers never Precluded, tau0-stable{}{}",
            cases.len(),
            if detail.is_empty() { "" } else { ": " },
            detail
        ),
    );
}

// sanity for helpers used above
#[test]
fn scaled_field_solves_the_same_equation() {
    let g = grid(10.0, 1024);
    let f = eval_catalog_scaled(&ExactSolution::SatsumaYajima, 0.0, &g, 2.0).unwrap();
    assert!(f.values()[512].norm() > 5.0); // 2 * SY(0, 0) = 4 sqrt(2)
    assert!(variance(&f).is_ok());
    assert!(exact_period(&ExactSolution::SatsumaYajima).is_ok());
    assert_eq!(f.background, BackgroundKind::Zero);
    assert_eq!(
        ExactSolution::SatsumaYajima.model().family,
        Family::PowerNLS
    );
}
