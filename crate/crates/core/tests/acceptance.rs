//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use warped_poisson::criterion::{
    containment_check, containment_check_with_c0, decide, ricci_power_criterion, series_terms,
    two_sided_ricci_criterion, DecayEnvelope, LambdaMode, Verdict, VerdictConfig,
};
use warped_poisson::geometry::{ModelManifold, WarpingProfile};
use warped_poisson::green::{solve_poisson, GreenProfile, PoissonSolve};
use warped_poisson::numerics::integrate;
use warped_poisson::spectral::{lambda1, lambda1_ess, RadialDomain};
use warped_poisson::verify::{donnelly_check, levelset_bound_check, sharpness_sweep};

fn euclid3(r_max: f64) -> ModelManifold<f64> {
    ModelManifold::with_defaults(3, WarpingProfile::euclidean(r_max).unwrap()).unwrap()
}

fn sinh3(r_max: f64) -> ModelManifold<f64> {
    ModelManifold::with_defaults(3, WarpingProfile::hyperbolic(r_max).unwrap()).unwrap()
}

fn power_exp3(gamma: f64, r_max: f64) -> ModelManifold<f64> {
    ModelManifold::with_defaults(3, WarpingProfile::power_exp(gamma, r_max).unwrap()).unwrap()
}

fn cusp3(r_max: f64) -> ModelManifold<f64> {
    ModelManifold::with_defaults(3, WarpingProfile::exp_decay_cusp(r_max).unwrap()).unwrap()
}

fn report(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

#[test]
fn criterion_01_closed_form_green_oracles() {
    let pi = std::f64::consts::PI;
    let ge = GreenProfile::minimal(&euclid3(100.0)).unwrap();
    let gs = GreenProfile::minimal(&sinh3(60.0)).unwrap();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let r = 0.1 * (10.0f64 / 0.1).powf(i as f64 / 49.0);
        let exact_e = 1.0 / (4.0 * pi * r);
        let err_e = (ge.eval(r).unwrap() - exact_e).abs() / exact_e;
        // coth r - 1 written cancellation-free as 2/(e^{2r} - 1).
        let exact_s = 2.0 / (2.0 * r).exp_m1() / (4.0 * pi);
        let err_s = (gs.eval(r).unwrap() - exact_s).abs() / exact_s;
        worst = worst.max(err_e).max(err_s);
    }
    report(
        "criterion 1 (closed-form Green oracles)",
        worst < 1e-8,
        &format!("worst relative error {worst:.3e} over 50 radii x 2 families"),
    );
}

#[test]
fn criterion_02_unit_flux_invariant() {
    let families = [euclid3(100.0), sinh3(60.0), power_exp3(2.0, 30.0)];
    let windows = [(0.4f64, 9.0f64), (0.4, 9.0), (0.4, 6.0)];
    let mut worst = 0.0f64;
    for (m, (r_lo, r_hi)) in families.iter().zip(windows) {
        let g = GreenProfile::minimal(m).unwrap();
        let s_hi = g.eval(r_lo).unwrap();
        let s_lo = g.eval(r_hi).unwrap();
        for k in 0..20 {
            let level = s_lo * (s_hi / s_lo).powf(k as f64 / 19.0);
            let flux = g.flux_on_level(level).unwrap();
            worst = worst.max((flux - 1.0).abs());
        }
    }
    report(
        "criterion 2 (unit flux on 20 levels x 3 families)",
        worst < 1e-6,
        &format!("worst |flux - 1| = {worst:.3e}"),
    );
}

#[test]
fn criterion_03_poisson_oracles() {
    let sol_e = match solve_poisson(&euclid3(100.0), |r: f64| (-r).exp()).unwrap() {
        PoissonSolve::Finite(s) => s,
        other => panic!("euclid solve diverged: {other:?}"),
    };
    let sol_s = match solve_poisson(&sinh3(60.0), |r: f64| (-2.0 * r).exp()).unwrap() {
        PoissonSolve::Finite(s) => s,
        other => panic!("sinh solve diverged: {other:?}"),
    };
    let err_e = (sol_e.value_at_pole - 1.0).abs();
    let err_s = (sol_s.value_at_pole - 0.125).abs() / 0.125;
    let fubini_e = (sol_e.value_at_pole - sol_e.pole_from_profile).abs();
    let fubini_s =
        (sol_s.value_at_pole - sol_s.pole_from_profile).abs() / sol_s.value_at_pole.abs();
    let pass = err_e < 1e-7
        && err_s < 1e-7
        && sol_e.residual_rms < 1e-6
        && sol_s.residual_rms < 1e-6
        && fubini_e < 1e-8
        && fubini_s < 1e-8;
    report(
        "criterion 3 (Poisson oracles u(p)=1 and u(p)=1/8)",
        pass,
        &format!(
            "errors {err_e:.2e}/{err_s:.2e}, residual rms {:.2e}/{:.2e}, fubini {fubini_e:.2e}/{fubini_s:.2e}",
            sol_e.residual_rms, sol_s.residual_rms
        ),
    );
}

#[test]
fn criterion_04_spectrum_two_sided() {
    let m = sinh3(60.0);
    let ess = lambda1_ess(&m).unwrap();
    let ess_err = (ess.value - 1.0).abs();

    // Barta <= discrete value on every test domain; exterior monotone in R.
    let mut barta_ok = true;
    let mut prev = 0.0f64;
    let mut monotone = true;
    for radius in [1.0, 2.0, 4.0, 8.0] {
        let est = lambda1(&m, &RadialDomain::exterior(radius)).unwrap();
        barta_ok &= est.barta_lower <= est.value + 1e-6 * (1.0 + est.value);
        monotone &= est.value >= prev - 1e-3 * est.value.max(0.01);
        prev = est.value;
    }
    for m2 in [euclid3(100.0), power_exp3(2.0, 30.0)] {
        for radius in [1.0, 3.0] {
            let est = lambda1(&m2, &RadialDomain::exterior(radius)).unwrap();
            barta_ok &= est.barta_lower <= est.value + 1e-6 * (1.0 + est.value);
        }
        let est = lambda1(&m2, &RadialDomain::annulus(1.0, 2.5)).unwrap();
        barta_ok &= est.barta_lower <= est.value + 1e-6 * (1.0 + est.value);
    }
    report(
        "criterion 4 (sinh ess spectrum within 2%, Barta <= lambda1, exterior monotone)",
        ess_err < 0.02 && barta_ok && monotone,
        &format!(
            "ess = {} (err {ess_err:.3e}), barta_ok {barta_ok}, monotone {monotone}",
            ess.value
        ),
    );
}

#[test]
fn criterion_05_exhaustion() {
    for m in [euclid3(100.0), sinh3(60.0)] {
        let g = GreenProfile::minimal(&m).unwrap();
        let mut prev_sup = f64::INFINITY;
        for radius in [2.0f64, 4.0, 8.0, 16.0] {
            let gr = GreenProfile::dirichlet(&m, radius).unwrap();
            let mut sup = 0.0f64;
            for i in 0..50 {
                let r = 0.2 + (radius * 0.95 - 0.2) * i as f64 / 49.0;
                sup = sup.max(g.eval(r).unwrap() - gr.eval(r).unwrap());
            }
            let tail = g.eval(radius).unwrap(); // (1/ω)∫_R^∞ φ^{1-n}
            let abs_err = (sup - tail).abs();
            assert!(
                abs_err < 1e-8,
                "family {}: sup |G - G_R| = {sup:.3e} vs tail {tail:.3e}",
                m.warping().family_name()
            );
            assert!(sup < prev_sup + 1e-12, "sup must decrease in R");
            prev_sup = sup;
        }
    }
    report(
        "criterion 5 (Dirichlet exhaustion matches computable tail)",
        true,
        "both families",
    );
}

#[test]
fn criterion_06_series_criterion_fixtures() {
    let mut msgs = Vec::new();
    for mode in [LambdaMode::Numerical, LambdaMode::BartaCertified] {
        let r = ricci_power_criterion(2.0f64, 0.5, 1.0, mode).unwrap();
        let slope_ok = (r.fit.slope + 1.5).abs() < 0.1;
        let verdict_ok = r.verdict == Some(Verdict::Converges);
        msgs.push(format!(
            "{mode:?}: slope {:.3}, {:?}",
            r.fit.slope, r.verdict
        ));
        assert!(
            slope_ok && verdict_ok,
            "ricci-power fixture failed in {mode:?}"
        );

        let control = ricci_power_criterion(2.0f64, 0.0, 1.0, mode).unwrap();
        assert_ne!(
            control.verdict,
            Some(Verdict::Converges),
            "epsilon = 0 control must never converge ({mode:?})"
        );
    }
    let c2 = two_sided_ricci_criterion(3.0f64, 3.0, 0.5).unwrap();
    assert_eq!(
        c2.verdict,
        Some(Verdict::Converges),
        "gamma > 2 with bounded source"
    );
    report(
        "criterion 6 (series criterion fixtures)",
        true,
        &format!("{}; two_sided_ricci(3,3) converges", msgs.join("; ")),
    );
}

#[test]
fn criterion_07_sharpness_thresholds() {
    let t0 = std::time::Instant::now();
    for gamma in [2.0f64, 3.0] {
        let theory = 1.0 - gamma / 2.0;
        let r = sharpness_sweep(gamma, 3, theory - 0.5, theory + 0.5, 0.05).unwrap();
        assert!(
            r.monotone,
            "classification must be monotone in alpha (gamma {gamma})"
        );
        assert!(
            (r.detected_threshold - theory).abs() <= 0.05 + 1e-9,
            "gamma {gamma}: detected {} vs theory {theory}",
            r.detected_threshold
        );
        assert!(r.pass);
    }
    let elapsed = t0.elapsed();
    report(
        "criterion 7 (sharpness thresholds for gamma in {2,3})",
        elapsed.as_secs() < 300,
        &format!("thresholds within one step; runtime {elapsed:.1?} (< 5 min)"),
    );
}

#[test]
fn criterion_08_donnelly_decay() {
    let sinh = sinh3(60.0);
    let r = donnelly_check(&sinh).unwrap();
    assert!(!r.skipped);
    let sinh_ok = (r.fitted_slope + 2.0).abs() < 0.05 && r.pass;

    let cusp = cusp3(42.0);
    let rc = donnelly_check(&cusp).unwrap();
    assert!(!rc.skipped);
    let cusp_ok = rc.fitted_slope <= rc.bound_slope && rc.pass;

    // Parabolic mean-zero profile: zero mean < 1e-8 by independent
    // quadrature and interior residual |-ΔG + 1/V| < 1e-6 by fourth-order
    // differencing of the evaluated profile.
    let g = GreenProfile::parabolic(&cusp).unwrap();
    let v = g.total_volume().unwrap();
    let omega = cusp.sphere_area();
    let mean = integrate(
        |t: f64| g.eval(t).unwrap() * (2.0 * cusp.warping().log_phi(t)).exp() * omega,
        1e-5,
        42.0,
        1e-9,
    )
    .unwrap()
    .value;

    let h = 5e-3;
    let mut max_resid = 0.0f64;
    for i in 0..120 {
        let r = 1.0 + (30.0 - 1.0) * i as f64 / 119.0;
        let u = |x: f64| g.eval(x).unwrap();
        let d2 = (-u(r - 2.0 * h) + 16.0 * u(r - h) - 30.0 * u(r) + 16.0 * u(r + h)
            - u(r + 2.0 * h))
            / (12.0 * h * h);
        let d1 = (u(r - 2.0 * h) - 8.0 * u(r - h) + 8.0 * u(r + h) - u(r + 2.0 * h)) / (12.0 * h);
        let lap = d2 + 2.0 * cusp.warping().ratio_d1(r) * d1;
        max_resid = max_resid.max((-lap + 1.0 / v).abs());
    }

    report(
        "criterion 8 (spectral decay of Green tails)",
        sinh_ok && cusp_ok && mean.abs() < 1e-8 && max_resid < 1e-6,
        &format!(
            "sinh slope {:.4}; cusp slope {:.4} <= bound {:.4}; mean {:.2e}; residual {:.2e}",
            r.fitted_slope,
            rc.fitted_slope,
            rc.bound_slope,
            mean.abs(),
            max_resid
        ),
    );
}

#[test]
fn criterion_09_containment() {
    let mut detail = Vec::new();
    for m in [euclid3(60.0), sinh3(60.0), power_exp3(2.0, 25.0)] {
        let rep = containment_check(&m, 12).unwrap();
        assert!(
            rep.all_pass,
            "containment failed on {}: {rep:?}",
            m.warping().family_name()
        );
        detail.push(format!(
            "{}: {} rows",
            m.warping().family_name(),
            rep.rows.len()
        ));

        // Near-pole region {G > A} stays inside the unit ball.
        let g = GreenProfile::minimal(&m).unwrap();
        let r_a = g.radius_of_level(rep.a).unwrap();
        assert!(
            r_a <= 1.0 + 1e-9,
            "L(A, inf) must sit inside B_1, got radius {r_a}"
        );
    }
    // Undersized C0 negative control.
    let m = sinh3(60.0);
    let g = GreenProfile::minimal(&m).unwrap();
    let sup = g.gradient_ratio_profile().unwrap().sup;
    let control = containment_check_with_c0(&m, 12, sup * 0.11, sup).unwrap();
    assert!(!control.all_pass, "0.1x C0 negative control must fail");
    report(
        "criterion 9 (level-set containment + negative control)",
        true,
        &detail.join("; "),
    );
}

#[test]
fn criterion_10_levelset_bound_stability() {
    for m in [euclid3(100.0), sinh3(60.0)] {
        let rep = levelset_bound_check(&m).unwrap();
        assert!(
            rep.pass && rep.relative_change < 0.10,
            "{}: max ratio {} changed {:.2}% under refinement",
            m.warping().family_name(),
            rep.max_ratio,
            rep.relative_change * 100.0
        );
    }
    report(
        "criterion 10 (level-set bound stable under grid doubling)",
        true,
        "euclid + sinh",
    );
}

#[test]
fn criterion_11_deterministic_verify_suite() {
    let bin = env!("CARGO_BIN_EXE_warped-poisson");
    let dir = std::env::temp_dir().join(format!("wp_acceptance_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out1 = dir.join("verify1.json");
    let out2 = dir.join("verify2.json");
    for out in [&out1, &out2] {
        let status = std::process::Command::new(bin)
            .args(["verify", "--suite", "all", "--json"])
            .arg(out)
            .status()
            .expect("spawn verify");
        assert!(
            status.success(),
            "verify suite must pass (exit {:?})",
            status.code()
        );
    }
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    report(
        "criterion 11 (byte-identical verify reports)",
        b1 == b2,
        &format!("{} bytes", b1.len()),
    );
}

// Cross-cutting invariant from the criterion module: a pointwise larger
// envelope can only shrink terms, so strengthening decay never flips a
// verdict toward divergence.
#[test]
fn envelope_monotonicity_property() {
    let m = sinh3(60.0);
    let mut r1 = series_terms(
        &m,
        &DecayEnvelope::power(1.2f64),
        2,
        16,
        LambdaMode::Numerical,
    )
    .unwrap();
    let mut r2 = series_terms(
        &m,
        &DecayEnvelope::power(2.2f64),
        2,
        16,
        LambdaMode::Numerical,
    )
    .unwrap();
    decide(&mut r1, &VerdictConfig::default());
    decide(&mut r2, &VerdictConfig::default());
    for (a, b) in r1.terms.iter().zip(&r2.terms) {
        assert!(b.b <= a.b);
    }
    if r1.verdict == Some(Verdict::Converges) {
        assert_ne!(r2.verdict, Some(Verdict::Diverges));
    }
}
