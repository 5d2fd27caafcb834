//! Acceptance gate: the ten agreed checks, one test per criterion. Every
//! test prints a single PASS/FAIL line carrying the measured quantities
//! (visible with --show-output, and always printed on failure) and asserts
//! both the physics bound and the stated runtime ceiling.

use std::time::Instant;

use cascade_laser::analytic::{
    mean_photon_eta_form, mean_photon_special, steady_moments, steady_moments_eta_form,
    steady_variance, transient_moments, variance_balanced, variance_balanced_alt, variance_ground,
    variance_undriven, Quadrature, SpecialCase,
};
use cascade_laser::dynamics::{integrate_moments, sample_trajectories, Estimate};
use cascade_laser::fock::steady_state_with_state;
use cascade_laser::model::{compute_coefficients, max_stable_gain, LaserParams};
use cascade_laser::scan::{
    find_optimum, run_sweep, AxisSpec, Objective, Observable, ParamAxis, SearchAxis, SweepSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn report(criterion: u32, limit_s: f64, started: Instant, ok: bool, detail: &str) {
    let elapsed = started.elapsed().as_secs_f64();
    let timely = elapsed <= limit_s;
    let verdict = if ok && timely { "PASS" } else { "FAIL" };
    println!("{verdict} criterion {criterion}: {detail} [{elapsed:.2}s of {limit_s}s allowed]");
    assert!(
        ok && timely,
        "criterion {criterion}: {detail} [{elapsed:.2}s of {limit_s}s allowed]"
    );
}

fn params(a: f64, kappa: f64, omega: f64, eta: f64) -> LaserParams {
    LaserParams::new(a, kappa, omega, eta).unwrap()
}

/// Random valid point. With `feasible`, the gain is a fraction of the
/// stability boundary, which leaves the joint decay rate at least
/// kappa * (1 - f) since the rate is affine in the gain.
fn random_point(rng: &mut ChaCha12Rng, feasible: bool) -> LaserParams {
    let kappa = rng.random_range(0.05..5.0);
    let omega = rng.random_range(0.0..20.0);
    let eta = rng.random_range(-1.0..=1.0);
    let a = if feasible {
        let f = rng.random_range(0.01..0.9);
        match max_stable_gain(kappa, omega, eta).unwrap() {
            Some(a_max) => f * a_max,
            None => f * 1000.0,
        }
    } else {
        rng.random_range(0.0..1000.0)
    };
    params(a, kappa, omega, eta)
}

#[test]
fn criterion_01_headline_squeezing_optimum() {
    let t0 = Instant::now();
    let opt = find_optimum(
        Objective::MinimizeVarMinus,
        &params(1000.0, 0.2, 0.0, 0.0),
        &[SearchAxis {
            axis: ParamAxis::Omega,
            min: 0.0,
            max: 0.1,
        }],
    )
    .unwrap();
    let ok = (0.008..=0.016).contains(&opt.params.omega) && (0.015..=0.020).contains(&opt.value);
    report(
        1,
        5.0,
        t0,
        ok,
        &format!(
            "omega* = {:.6}, min var_minus = {:.6} ({:.2}% squeezing)",
            opt.params.omega,
            opt.value,
            100.0 * (1.0 - opt.value)
        ),
    );
}

#[test]
fn criterion_02_undriven_coherence_optimum() {
    let t0 = Instant::now();
    let opt = find_optimum(
        Objective::MinimizeVarMinus,
        &params(1000.0, 0.2, 0.0, 0.0),
        &[SearchAxis {
            axis: ParamAxis::Eta,
            min: 0.0,
            max: 1.0,
        }],
    )
    .unwrap();
    let ok = (0.015..=0.025).contains(&opt.params.eta) && (opt.value - 0.0198).abs() <= 5e-4;
    report(
        2,
        1.0,
        t0,
        ok,
        &format!("eta* = {:.6}, min var_minus = {:.6}", opt.params.eta, opt.value),
    );
}

#[test]
fn criterion_03_ground_injection_showcase_and_onset() {
    let t0 = Instant::now();
    let v = steady_variance(&params(0.99, 0.2, 10.1, 1.0), Quadrature::Minus).unwrap();

    // Onset of squeezing at eta = 1: bisection on var_minus = 1. The gain
    // cancels from the crossing, so any below-threshold A works; 0.3 keeps
    // the whole bracket stable.
    let f = |w: f64| steady_variance(&params(0.3, 0.2, w, 1.0), Quadrature::Minus).unwrap() - 1.0;
    let (mut lo, mut hi) = (3.0, 4.0);
    assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let onset = 0.5 * (lo + hi);
    let expected = (3.0 + 17.0f64.sqrt()) / 2.0;

    let ok = (v - 0.655).abs() <= 0.01 && (onset - expected).abs() <= 1e-3;
    report(
        3,
        1.0,
        t0,
        ok,
        &format!(
            "var_minus(10.1) = {v:.6}, onset = {onset:.7} vs (3+sqrt(17))/2 = {expected:.7}"
        ),
    );
}

#[test]
fn criterion_04_algebraic_identity_suite() {
    let t0 = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACC4);

    let mut worst_chi = 0.0f64;
    for _ in 0..10_000 {
        let k = compute_coefficients(&random_point(&mut rng, false)).unwrap();
        let scale = k.chi_plus.abs().max(k.chi_minus.abs());
        worst_chi = worst_chi
            .max((k.chi_plus - k.b * k.lambda_minus).abs() / scale)
            .max((k.chi_minus - k.b * k.lambda_plus).abs() / scale);
    }

    let mut worst_route = 0.0f64;
    for _ in 0..10_000 {
        let p = random_point(&mut rng, true);
        let a = steady_moments(&p).unwrap();
        let b = steady_moments_eta_form(&p).unwrap();
        let n = mean_photon_eta_form(&p).unwrap();
        let floor = 1e-3 * a.alpha_sq_plus.abs().max(a.alpha_sq_minus.abs()).max(1.0);
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(floor);
        worst_route = worst_route
            .max(rel(a.alpha_sq_plus, b.alpha_sq_plus))
            .max(rel(a.alpha_sq_minus, b.alpha_sq_minus))
            .max(rel(a.mean_photon, n));
    }

    let ok = worst_chi <= 1e-12 && worst_route <= 1e-10;
    report(
        4,
        5.0,
        t0,
        ok,
        &format!(
            "worst chi identity residual = {worst_chi:.2e} (<= 1e-12), \
             worst closed-form route split = {worst_route:.2e} (<= 1e-10), 10^4 points each"
        ),
    );
}

#[test]
fn criterion_05_special_case_reductions() {
    let t0 = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACC5);
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
    let mut worst = 0.0f64;

    for _ in 0..1000 {
        let kappa = rng.random_range(0.05..5.0);
        let eta = rng.random_range(-1.0..=1.0);
        let f = rng.random_range(0.01..0.9);
        let a = match max_stable_gain(kappa, 0.0, eta).unwrap() {
            Some(a_max) => f * a_max,
            None => f * 1000.0,
        };
        let m = steady_moments(&params(a, kappa, 0.0, eta)).unwrap();
        let (vp, vm) = variance_undriven(a, kappa, eta).unwrap();
        worst = worst.max(rel(m.var_plus, vp)).max(rel(m.var_minus, vm));
    }
    for eta in [1.0, 0.0] {
        for _ in 0..1000 {
            let kappa = rng.random_range(0.05..5.0);
            let omega = rng.random_range(0.0..20.0);
            let f = rng.random_range(0.01..0.9);
            let a = match max_stable_gain(kappa, omega, eta).unwrap() {
                Some(a_max) => f * a_max,
                None => f * 1000.0,
            };
            let m = steady_moments(&params(a, kappa, omega, eta)).unwrap();
            let (vp, vm) = if eta == 1.0 {
                variance_ground(a, kappa, omega).unwrap()
            } else {
                variance_balanced(a, kappa, omega).unwrap()
            };
            worst = worst.max(rel(m.var_plus, vp)).max(rel(m.var_minus, vm));
        }
    }

    // The alternate balanced-case transcription disagrees with the general
    // form at the headline point; the gap is the documented feature.
    let (_, alt_minus) = variance_balanced_alt(1000.0, 0.2, 0.012).unwrap();
    let (_, gen_minus) = variance_balanced(1000.0, 0.2, 0.012).unwrap();
    let gap = (alt_minus - gen_minus).abs();

    let ok = worst <= 1e-12 && gap > 0.1;
    report(
        5,
        2.0,
        t0,
        ok,
        &format!(
            "worst reduction split = {worst:.2e} (<= 1e-12) over 3 x 10^3 points, \
             alternate-transcription gap = {gap:.4} (> 0.1)"
        ),
    );
}

#[test]
fn criterion_06_moment_ode_matches_closed_forms() {
    let t0 = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACC6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let kappa = rng.random_range(0.1..2.0);
        let omega = rng.random_range(0.0..10.0);
        let eta = rng.random_range(-1.0..=1.0);
        let f = rng.random_range(0.05..0.8);
        let a = match max_stable_gain(kappa, omega, eta).unwrap() {
            Some(a_max) => f * a_max,
            None => f * 100.0,
        };
        let p = params(a, kappa, omega, eta);
        let k = compute_coefficients(&p).unwrap();
        let t_final = 40.0 / k.lambda_minus;
        let step = 0.01 / k.lambda_plus.max(1.0);
        let states = integrate_moments(&p, t_final, step, usize::MAX).unwrap();
        let (qp, qm) = states.last().unwrap().quadrature_alpha_sq();
        let cf = transient_moments(&p, t_final).unwrap().moments;
        let floor = 1e-3 * cf.alpha_sq_plus.abs().max(cf.alpha_sq_minus.abs()).max(1.0);
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(floor);
        worst = worst
            .max(rel(qp, cf.alpha_sq_plus))
            .max(rel(qm, cf.alpha_sq_minus));
    }

    // Observed order against the closed form mid-transient, where the
    // truncation error is actually alive.
    let p = params(0.33, 0.2, 1.0, 0.0);
    let cf = transient_moments(&p, 8.0).unwrap().moments;
    let errs = |h: f64| {
        let states = integrate_moments(&p, 8.0, h, usize::MAX).unwrap();
        let (qp, qm) = states.last().unwrap().quadrature_alpha_sq();
        ((qp - cf.alpha_sq_plus).abs(), (qm - cf.alpha_sq_minus).abs())
    };
    let (e1p, e1m) = errs(0.4);
    let (e2p, e2m) = errs(0.2);
    let (order_p, order_m) = ((e1p / e2p).log2(), (e1m / e2m).log2());

    let ok = worst <= 1e-8
        && (3.7..=4.3).contains(&order_p)
        && (3.7..=4.3).contains(&order_m);
    report(
        6,
        10.0,
        t0,
        ok,
        &format!(
            "worst terminal split = {worst:.2e} (<= 1e-8) on 20 points at t = 40/lambda_minus, \
             observed orders = ({order_p:.2}, {order_m:.2}) in 4 +- 0.3"
        ),
    );
}

#[test]
fn criterion_07_sampler_statistics() {
    let t0 = Instant::now();
    let run = |p: &LaserParams| {
        let k = compute_coefficients(p).unwrap();
        let t_final = 30.0 / k.lambda_minus;
        let step = 0.01 / k.lambda_plus;
        let stats = sample_trajectories(p, 10_000, t_final, step, 42).unwrap();
        let cf = transient_moments(p, t_final).unwrap().moments;
        let z = |e: Estimate, target: f64| (e.value - target) / e.std_err;
        (
            stats,
            z(stats.alpha_sq_plus, cf.alpha_sq_plus),
            z(stats.alpha_sq_minus, cf.alpha_sq_minus),
        )
    };

    let (_, z1p, z1m) = run(&params(0.33, 0.2, 0.0, 0.3));
    let (squeezed, z2p, z2m) = run(&params(1000.0, 0.2, 0.012, 0.0));
    // The formally negative noise variance appears for a driven eta = 1
    // point; there the plus quadrature dips below vacuum through purely
    // imaginary trajectory amplitudes.
    let (imag, z3p, z3m) = run(&params(0.33, 0.2, 0.5, 1.0));

    let zs = [z1p, z1m, z2p, z2m, z3p, z3m];
    let within = zs.iter().all(|z| z.abs() <= 3.0);
    let ok = within && squeezed.alpha_sq_minus.value > 0.0 && imag.alpha_sq_plus.value < 0.0;
    report(
        7,
        60.0,
        t0,
        ok,
        &format!(
            "z-scores = [{:.2}, {:.2}, {:.2}, {:.2}, {:.2}, {:.2}] (all within 3), \
             squeezed <alpha_-^2> = {:.4} > 0, imaginary-noise <alpha_+^2> = {:.4} < 0",
            z1p, z1m, z2p, z2m, z3p, z3m,
            squeezed.alpha_sq_minus.value, imag.alpha_sq_plus.value
        ),
    );
}

#[test]
fn criterion_08_fock_oracle_equivalence() {
    let t0 = Instant::now();
    let suite: [(f64, f64, f64, f64, usize); 10] = [
        (0.3, 0.2, 0.0, 0.0, 40),
        (0.5, 0.2, 1.0, 0.3, 24),
        (0.5, 0.2, 10.5, 1.0, 28),
        (0.8, 0.2, 0.012, 0.0, 96),
        (0.2, 0.3, 2.0, 0.5, 20),
        (1.0, 0.5, 0.8, -0.2, 32),
        (0.33, 0.2, 1.0, 0.5, 24),
        (0.6, 0.15, 0.3, 0.1, 44),
        (0.4, 0.25, 5.0, 0.8, 32),
        (0.05, 0.1, 0.0, -0.5, 36),
    ];
    let mut all_converged = true;
    let mut worst_moment = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut worst_herm = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut min_product = f64::INFINITY;
    for (a, kappa, omega, eta, n_max) in suite {
        let p = params(a, kappa, omega, eta);
        let (r, state) = steady_state_with_state(&p, n_max, 1e-9).unwrap();
        all_converged &= r.converged;
        let m = steady_moments(&p).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
        worst_moment = worst_moment
            .max(rel(r.moments.mean_photon, m.mean_photon))
            .max(rel(r.moments.var_plus, m.var_plus))
            .max(rel(r.moments.var_minus, m.var_minus));
        worst_trace = worst_trace.max((state.trace() - 1.0).abs());
        worst_herm = worst_herm.max(state.hermiticity_defect());
        min_eig = min_eig.min(state.min_eigenvalue());
        min_product = min_product.min(r.moments.var_plus * r.moments.var_minus);
    }
    let ok = all_converged
        && worst_moment <= 1e-5
        && worst_trace <= 1e-10
        && worst_herm <= 1e-12
        && min_eig >= -1e-8
        && min_product >= 1.0 - 1e-6;
    report(
        8,
        300.0,
        t0,
        ok,
        &format!(
            "all converged = {all_converged}, worst moment split = {worst_moment:.2e} (<= 1e-5), \
             worst |trace-1| = {worst_trace:.1e}, worst hermiticity = {worst_herm:.1e}, \
             min eigenvalue = {min_eig:.1e}, min uncertainty product = {min_product:.8}"
        ),
    );
}

#[test]
fn criterion_09_threshold_surface() {
    let t0 = Instant::now();
    // Bisection straight on the decay rate, independent of the closed-form
    // boundary expression.
    let lambda = |a: f64| compute_coefficients(&params(a, 0.2, 10.5, 1.0)).unwrap().lambda_minus;
    let (mut lo, mut hi) = (0.5, 2.0);
    assert!(lambda(lo) > 0.0 && lambda(hi) < 0.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if lambda(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a_max = 0.5 * (lo + hi);
    let closed = max_stable_gain(0.2, 10.5, 1.0).unwrap().unwrap();

    let r = run_sweep(&SweepSpec {
        base: params(0.99, 0.2, 3.0, 1.0),
        axes: vec![AxisSpec {
            axis: ParamAxis::Omega,
            min: 3.0,
            max: 12.0,
            count: 301,
        }],
        observable: Observable::VarMinus,
        output: None,
    })
    .unwrap();
    let (mut masked, mut unmasked) = (0usize, 0usize);
    let mut mask_ok = true;
    for (idx, v) in r.values.iter().enumerate() {
        let mut p = r.base;
        p.omega = r.grids[0][idx];
        let lm = compute_coefficients(&p).unwrap().lambda_minus;
        mask_ok &= v.is_none() == (lm <= 0.0);
        if v.is_none() {
            masked += 1;
        } else {
            unmasked += 1;
        }
    }

    let ok = (a_max - 0.996).abs() <= 0.002
        && (a_max - closed).abs() <= 1e-9
        && mask_ok
        && masked > 0
        && unmasked > 0;
    report(
        9,
        5.0,
        t0,
        ok,
        &format!(
            "bisected A_max = {a_max:.6} (0.996 +- 0.002; closed form {closed:.6}), \
             mask audit over 301 points: {masked} masked / {unmasked} clear, exact match = {mask_ok}"
        ),
    );
}

#[test]
fn criterion_10_mean_photon_checks() {
    let t0 = Instant::now();
    let mut zeros_exact = true;
    for (a, kappa) in [(0.3, 0.2), (0.99, 0.2), (0.5, 0.15)] {
        zeros_exact &= steady_moments(&params(a, kappa, 0.0, 1.0)).unwrap().mean_photon == 0.0;
        zeros_exact &=
            mean_photon_special(a, kappa, SpecialCase::Undriven { eta: 1.0 }).unwrap() == 0.0;
    }

    let general = steady_moments(&params(0.3, 0.2, 0.0, 0.0)).unwrap().mean_photon;
    let special = mean_photon_special(0.3, 0.2, SpecialCase::Undriven { eta: 0.0 }).unwrap();
    let balanced_ok = (general - 0.75).abs() <= 1e-15 && (special - 0.75).abs() <= 1e-15;

    // Lasing without inversion: every driven point at eta = 1 emits.
    let r = run_sweep(&SweepSpec {
        base: params(0.3, 0.2, 0.0, 1.0),
        axes: vec![AxisSpec {
            axis: ParamAxis::Omega,
            min: 0.0,
            max: 3.0,
            count: 201,
        }],
        observable: Observable::MeanPhoton,
        output: None,
    })
    .unwrap();
    let mut lwi_ok = true;
    for (idx, v) in r.values.iter().enumerate() {
        let omega = r.grids[0][idx];
        let v = v.expect("A = 0.3 is below threshold at eta = 1 for all drives");
        lwi_ok &= if omega == 0.0 { v == 0.0 } else { v > 0.0 };
    }

    let ok = zeros_exact && balanced_ok && lwi_ok;
    report(
        10,
        1.0,
        t0,
        ok,
        &format!(
            "undriven eta = 1 photon number exactly zero = {zeros_exact}, \
             n(0.3, 0.2) = {general:.17} within 1e-15 of 3/4, \
             driven eta = 1 grid all emitting = {lwi_ok}"
        ),
    );
}
