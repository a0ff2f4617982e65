use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use plap_core::comparison_suite::{
    lichnerowicz_lower_bound, matei_baseline_bound, p_laplacian_expanded, p_laplacian_radial, tol_band,
    BoundReport, CheckInputs, RadialFunction, Verdict,
};
use plap_core::model_geometry::{sn_k, sn_k_second};
use plap_core::radial_eigensolver::{p_rayleigh_quotient, solve_first_dirichlet_ball, solve_first_dirichlet_model};
use plap_core::rearrangement_isoperimetry::{
    decreasing_rearrangement, interpolant_lp_mass, quantile_thresholds, volume_matching_radius, DensityFn,
    RadialSamples,
};
use plap_core::{ModelSpace, RadialProblem, WarpedProfile};

fn solver_config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn sn_k_solves_its_ode(k in -2.0f64..2.0, t in 0.05f64..1.4) {
        let h = 1e-4;
        let fd = (sn_k(k, t + h).unwrap() - 2.0 * sn_k(k, t).unwrap() + sn_k(k, t - h).unwrap()) / (h * h);
        prop_assert!((fd + k * sn_k(k, t).unwrap()).abs() < 1e-5);
        prop_assert!((sn_k_second(k, t) + k * sn_k(k, t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ball_volume_derivative_is_sphere_area(n in 2usize..6, k in -1.0f64..1.0, r in 0.2f64..1.5) {
        let m = ModelSpace::new(n, k).unwrap();
        let h = 1e-4;
        let fd = (m.ball_volume(r + h).unwrap() - m.ball_volume(r - h).unwrap()) / (2.0 * h);
        let area = m.sphere_area(r).unwrap();
        prop_assert!((fd - area).abs() <= 1e-6 * area);
    }

    #[test]
    fn sphere_volume_is_symmetric(n in 2usize..6, k in 0.3f64..3.0, frac in 0.05f64..0.95) {
        let m = ModelSpace::new(n, k).unwrap();
        let d = m.diameter();
        let total = m.total_volume().unwrap();
        let sum = m.ball_volume(frac * d).unwrap() + m.ball_volume((1.0 - frac) * d).unwrap();
        prop_assert!((sum - total).abs() <= 1e-9 * total);
    }

    #[test]
    fn volume_matching_inverts_the_volume_fraction(n in 2usize..5, k in 0.5f64..2.0, frac in 0.02f64..0.98) {
        let m = ModelSpace::new(n, k).unwrap();
        let r = frac * m.diameter();
        let fraction = m.ball_volume(r).unwrap() / m.total_volume().unwrap();
        let back = volume_matching_radius(&m, fraction).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * m.diameter());
    }

    #[test]
    fn lichnerowicz_bound_dominates_baseline(n in 2usize..8, p in 2.0f64..6.0, k in 0.1f64..4.0) {
        let ours = lichnerowicz_lower_bound(n, p, k, 0.0).unwrap();
        let base = matei_baseline_bound(n, p, k).unwrap();
        prop_assert!(ours > base);
        let at_two = lichnerowicz_lower_bound(n, 2.0, k, 0.0).unwrap();
        prop_assert!((at_two - n as f64 * k).abs() <= 1e-12 * n as f64 * k);
    }

    #[test]
    fn lichnerowicz_bound_decreases_with_excess(n in 2usize..6, p in 2.0f64..4.0, e1 in 0.0f64..0.2, de in 0.0f64..0.2) {
        let a = lichnerowicz_lower_bound(n, p, 1.0, e1).unwrap();
        let b = lichnerowicz_lower_bound(n, p, 1.0, e1 + de).unwrap();
        prop_assert!(b <= a);
    }

    #[test]
    fn verdict_follows_the_band(lhs in -10.0f64..10.0, rhs in -10.0f64..10.0, bracket in 0.0f64..1e-6) {
        let band = tol_band(bracket);
        let rep = BoundReport::decided("x", CheckInputs::new("-", 2), lhs, rhs, rhs - lhs, band);
        let expected = if rhs - lhs >= -band { Verdict::Holds } else { Verdict::Violated };
        prop_assert_eq!(rep.verdict, expected);
    }

    #[test]
    fn p_laplacian_expansion_matches_radial_form(
        a in 0.0f64..0.1,
        m in 2u32..4,
        p in 1.5f64..4.0,
        frac in 0.1f64..0.9,
        omega in 0.2f64..1.0,
    ) {
        let prof = WarpedProfile::perturbed_sphere(3, a, m).unwrap();
        let f = RadialFunction::Cosine { omega };
        let t = frac * prof.end().min(PI / omega);
        let radial = p_laplacian_radial(&prof, p, &f, t).unwrap();
        let expanded = p_laplacian_expanded(&prof, p, &f, t).unwrap();
        prop_assert!((radial - expanded).abs() <= 1e-10 * radial.abs().max(1.0));
    }

    #[test]
    fn curvature_defects_are_nonnegative(a in -0.1f64..0.1, m in 2u32..5, k in 0.0f64..1.5, frac in 0.01f64..0.99) {
        let prof = WarpedProfile::perturbed_sphere(2, a, m).unwrap();
        let t = frac * prof.end().min(ModelSpace::new(2, k).unwrap().diameter());
        prop_assert!(prof.ric_minus(k, t).unwrap() >= 0.0);
        prop_assert!(prof.laplacian_excess_psi(k, t).unwrap() >= 0.0);
    }

    #[test]
    fn curvature_norm_is_monotone(a in 0.01f64..0.1, k1 in 0.0f64..1.0, dk in 0.0f64..0.5, q in 1.5f64..3.0, dq in 0.0f64..2.0) {
        let prof = WarpedProfile::perturbed_sphere(2, a, 2).unwrap().with_grid(1024);
        let base = prof.integral_curvature_norm(k1, q, None).unwrap();
        let more_k = prof.integral_curvature_norm(k1 + dk, q, None).unwrap();
        let more_q = prof.integral_curvature_norm(k1, q + dq, None).unwrap();
        prop_assert!(more_k >= base * (1.0 - 1e-10));
        prop_assert!(more_q >= base * (1.0 - 1e-10));
    }

    #[test]
    fn rayleigh_quotient_is_scale_invariant(c in 0.01f64..100.0, p in 1.5f64..4.0) {
        let problem = RadialProblem::model_ball(&ModelSpace::new(3, 1.0).unwrap(), 1.0, p).unwrap();
        let f: Vec<f64> = (0..=64).map(|i| (1.0 - (i as f64 / 64.0).powi(2)).max(0.0)).collect();
        let scaled: Vec<f64> = f.iter().map(|v| c * v).collect();
        let a = p_rayleigh_quotient(&f, &problem).unwrap();
        let b = p_rayleigh_quotient(&scaled, &problem).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }
}

fn radial_bump(c: [f64; 3]) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    // positive on [0, 1], with a few wiggles so level sets have several components
    let f = move |t: f64| 2.0 + c[0] * (3.0 * t).cos() + c[1] * (7.0 * t).sin() + c[2] * t * t;
    let df = move |t: f64| -3.0 * c[0] * (3.0 * t).sin() + 7.0 * c[1] * (7.0 * t).cos() + 2.0 * c[2] * t;
    (f, df)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn rearrangement_is_monotone_and_equimeasurable(
        c0 in -0.9f64..0.9,
        c1 in -0.5f64..0.5,
        c2 in -0.5f64..0.5,
        n in 2usize..4,
    ) {
        let (f, df) = radial_bump([c0, c1, c2]);
        let samples = RadialSamples::from_fn(1.0, 512, f, df).unwrap();
        let model = ModelSpace::new(n, 0.0).unwrap();
        let density: Arc<DensityFn> = Arc::new(move |t| model.area_density(t));
        let fbar = decreasing_rearrangement(&samples, density.clone()).unwrap();
        let vol = fbar.volume();

        let values: Vec<f64> = (0..=200).map(|i| fbar.value(vol * i as f64 / 200.0)).collect();
        prop_assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));

        let dist = fbar.distribution();
        for tau in quantile_thresholds(&samples, density.clone(), 64).unwrap() {
            let original = dist.superlevel_volume(tau);
            let rearranged = fbar.superlevel_volume(tau);
            prop_assert!((original - rearranged).abs() <= 1e-8 * vol);
        }
        for p in [1.5, 2.0, 3.0, 4.0] {
            let a = interpolant_lp_mass(&samples, density.as_ref(), p);
            let b = fbar.lp_mass(p);
            prop_assert!((a - b).abs() <= 1e-8 * a);
        }
    }
}

proptest! {
    #![proptest_config(solver_config())]

    #[test]
    fn model_eigenvalue_decreases_with_radius(n in 2usize..4, k in -1.0f64..1.0, r in 0.3f64..1.2, dr in 0.05f64..0.4, p in 1.6f64..3.5) {
        let m = ModelSpace::new(n, k).unwrap();
        let small = solve_first_dirichlet_model(&m, r, p, 1e-8).unwrap();
        let large = solve_first_dirichlet_model(&m, r + dr, p, 1e-8).unwrap();
        prop_assert!(large.lambda < small.lambda);
    }

    #[test]
    fn dirichlet_ground_state_is_positive_and_decreasing(a in 0.0f64..0.1, m in 2u32..4, frac in 0.2f64..0.9, p in 1.6f64..3.5) {
        let prof = WarpedProfile::perturbed_sphere(2, a, m).unwrap();
        let res = solve_first_dirichlet_ball(&prof, frac * prof.end(), p, 1e-8).unwrap();
        prop_assert_eq!(res.zero_count, 0);
        let max_slope = res.fprime.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(max_slope <= 1e-8, "max f' = {max_slope:e}");
    }
}
