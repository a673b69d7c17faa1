//! Property tests for the numerical kernels.

use proptest::prelude::*;
use warped_poisson::geometry::{ModelManifold, WarpingProfile};
use warped_poisson::green::GreenProfile;
use warped_poisson::numerics::{fit_log_slope, integrate, smallest_eigenpair};

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    /// Quadrature is additive over interval splits to within the summed
    /// error estimates.
    #[test]
    fn quadrature_split_additivity(
        c0 in -2.0f64..2.0,
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
        split in 0.1f64..0.9,
    ) {
        let f = |x: f64| c0 + c1 * x + c2 * (3.0 * x).sin();
        let whole = integrate(f, 0.0, 1.0, 1e-12).unwrap();
        let left = integrate(f, 0.0, split, 1e-12).unwrap();
        let right = integrate(f, split, 1.0, 1e-12).unwrap();
        let gap = (whole.value - left.value - right.value).abs();
        prop_assert!(gap <= whole.error_estimate + left.error_estimate + right.error_estimate + 1e-13);
    }

    /// Cubic polynomials are integrated exactly (well inside the rule's
    /// degree).
    #[test]
    fn quadrature_polynomial_exactness(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        c in -3.0f64..3.0,
        d in -3.0f64..3.0,
        hi in 0.5f64..4.0,
    ) {
        let f = |x: f64| a + b * x + c * x * x + d * x * x * x;
        let exact = a * hi + b * hi * hi / 2.0 + c * hi.powi(3) / 3.0 + d * hi.powi(4) / 4.0;
        let q = integrate(f, 0.0, hi, 1e-11).unwrap();
        prop_assert!((q.value - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
    }

    /// Scaling the stiffness scales the minimal eigenvalue; scaling both
    /// sides of the pencil leaves it unchanged.
    #[test]
    fn eigen_homogeneity(scale in 0.05f64..20.0, n in 8usize..40) {
        let h = 1.0 / (n as f64 + 1.0);
        let d: Vec<f64> = vec![2.0 / (h * h); n];
        let e: Vec<f64> = vec![-1.0 / (h * h); n - 1];
        let w: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin()).collect();
        let (l, _) = smallest_eigenpair(&d, &e, &w).unwrap();

        let d2: Vec<f64> = d.iter().map(|x| scale * x).collect();
        let e2: Vec<f64> = e.iter().map(|x| scale * x).collect();
        let (l2, _) = smallest_eigenpair(&d2, &e2, &w).unwrap();
        prop_assert!((l2 - scale * l).abs() <= 1e-10 * (scale * l).abs());

        let w3: Vec<f64> = w.iter().map(|x| scale * x).collect();
        let (l3, _) = smallest_eigenpair(&d2, &e2, &w3).unwrap();
        prop_assert!((l3 - l).abs() <= 1e-10 * l.abs());
    }

    /// The pencil spectrum is invariant under diagonal congruence: scaling
    /// row/column i by d_i on both the stiffness and the mass leaves every
    /// generalized eigenvalue unchanged.
    #[test]
    fn eigen_diagonal_congruence_invariance(seed in 1u64..500) {
        let n = 24usize;
        let h = 1.0 / (n as f64 + 1.0);
        let d0: Vec<f64> = vec![2.0 / (h * h); n];
        let e0: Vec<f64> = vec![-1.0 / (h * h); n - 1];
        let w0: Vec<f64> = (0..n).map(|i| 1.0 + 0.3 * ((i as f64) * 1.3).cos()).collect();
        let (l, _) = smallest_eigenpair(&d0, &e0, &w0).unwrap();

        // Deterministic pseudo-random positive scalings from the seed.
        let scale: Vec<f64> = (0..n)
            .map(|i| 0.2 + ((seed as f64 * 0.7 + i as f64 * 2.1).sin() + 1.5))
            .collect();
        let d1: Vec<f64> = (0..n).map(|i| scale[i] * scale[i] * d0[i]).collect();
        let e1: Vec<f64> = (0..n - 1).map(|i| scale[i] * scale[i + 1] * e0[i]).collect();
        let w1: Vec<f64> = (0..n).map(|i| scale[i] * scale[i] * w0[i]).collect();
        let (l1, _) = smallest_eigenpair(&d1, &e1, &w1).unwrap();
        prop_assert!((l1 - l).abs() <= 1e-10 * l.abs());
    }

    /// Exact power laws are recovered to machine precision.
    #[test]
    fn fit_recovers_power_laws(p in -3.0f64..3.0, scale in 0.1f64..10.0) {
        let xs: Vec<f64> = (1..=12).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| scale * x.powf(p)).collect();
        let fit = fit_log_slope(&xs, &ys).unwrap();
        prop_assert!((fit.slope - p).abs() < 1e-10);
        prop_assert!((fit.intercept - scale.ln()).abs() < 1e-10);
        prop_assert!(fit.residual_rms < 1e-10);
    }
}

/// The numerical core is generic over the scalar; a coarse f32 run of the
/// geometry pipeline must agree with the f64 one at single precision.
#[test]
fn f32_instantiation_smoke() {
    let w = WarpingProfile::<f32>::hyperbolic(20.0).unwrap();
    let m = ModelManifold::new(
        3,
        w,
        0.1f32,
        warped_poisson::geometry::NumericsParams::default(),
    )
    .unwrap();
    assert!((m.ricci_radial(2.0).unwrap() + 2.0).abs() < 1e-4);
    assert!((m.mean_curvature(10.0).unwrap() - 2.0).abs() < 1e-3);
    let q = integrate(|x: f32| x * x, 0.0f32, 1.0, 1e-5).unwrap();
    assert!((q.value - 1.0 / 3.0).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    /// Level-set inversion round-trips through the profile.
    #[test]
    fn level_set_roundtrip(r_target in 0.2f64..20.0) {
        let m = ModelManifold::with_defaults(3, WarpingProfile::euclidean(100.0).unwrap()).unwrap();
        let g = GreenProfile::minimal(&m).unwrap();
        let level = g.eval(r_target).unwrap();
        let r = g.radius_of_level(level).unwrap();
        prop_assert!((r - r_target).abs() < 1e-8 * (1.0 + r_target));
    }
}
