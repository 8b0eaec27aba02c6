mod common;

use std::f64::consts::PI;

use common::*;
use levy_growth::ambit::{mu_self_intersection_direct, AmbitFamily};
use levy_growth::circle_cov::*;
use levy_growth::levy::{BasisSpec, ControlMeasure, SpotLaw};
use levy_growth::moments::{cov_linear, LinearModel, ModelMomentQuery, Point};
use levy_growth::schedule::Schedule;
use levy_growth::weight::{FourierWeight, WeightFunction};
use proptest::prelude::*;

#[test]
fn five_harmonic_boundary_is_admissible() {
    let h = hbar_series(&FIVE_HARMONICS);
    let mut prev = h(0.0);
    for i in 1..=2000 {
        let v = h(PI * i as f64 / 2000.0);
        assert!(v <= prev);
        prev = v;
    }
}

#[test]
fn closed_form_overlap_agrees_with_set_definition() {
    let h = hbar_series(&FIVE_HARMONICS);
    for phi in [0.0, 0.4, 1.3, 2.9, PI, -0.7] {
        let a = mu_self_intersection_direct(&h, phi);
        let b = overlap_by_min(&h, phi);
        assert!((a - b).abs() < 1e-9, "{phi}: {a} vs {b}");
    }
}

#[test]
fn harmonic_coefficients_match_quadrature() {
    let oracle = overlap_coefficients_by_quadrature(&FIVE_HARMONICS, 2048, 10);
    let published = lambda_from_hbar(&FIVE_HARMONICS, 10);
    for j in 1..=10 {
        assert!((oracle[j] - published[j]).abs() < 1e-5, "j = {j}: {} vs {}", oracle[j], published[j]);
    }
    let mut third = [0.0; 4];
    third[3] = 0.4;
    let oracle = overlap_coefficients_by_quadrature(&third, 2048, 8);
    let published = lambda_from_hbar(&third, 8);
    for j in 1..=8 {
        assert!((oracle[j] - published[j]).abs() < 1e-6);
    }
}

#[test]
fn corrected_constant_term_matches_quadrature() {
    let oracle = overlap_coefficients_by_quadrature(&FIVE_HARMONICS, 2048, 10);
    let corrected = overlap_fourier_coefficients(&FIVE_HARMONICS, 10);
    for (j, (o, c)) in oracle.iter().zip(&corrected).enumerate() {
        assert!((o - c).abs() < 1e-5, "j = {j}: {o} vs {c}");
    }
}

/// The published constant term disagrees with the overlap measure it is
/// meant to expand; this pins the size of that gap.
#[test]
fn published_constant_term_differs_from_quadrature() {
    let g = [2.0, 0.7];
    let oracle = overlap_coefficients_by_quadrature(&g, 2048, 0)[0];
    let published = lambda_from_hbar(&g, 0)[0];
    let gap = published - oracle;
    let expect = -8.0 / PI * g[1] - 2.0 * PI * g[0];
    assert!((gap - expect).abs() < 1e-5, "gap {gap}, expected {expect}");
}

fn tabulated_model() -> LinearModel {
    let rows = vec![
        vec![0.3, 0.8, -0.4, 0.25, 0.1, 0.0, 0.05, -0.02, 0.03],
        vec![0.2, 0.5, 0.6, -0.1, 0.2, 0.1, 0.0, 0.04, 0.01],
    ];
    LinearModel {
        weight: WeightFunction::Fourier { coefficients: FourierWeight::Tabulated { times: vec![0.0, 6.0], rows } },
        ambit: AmbitFamily::FullAngle { lag: Schedule::linear(0.1, 1.0) },
        basis: BasisSpec::new(SpotLaw::Gaussian { drift: 0.0, variance: 1.7 }, ControlMeasure::Exponential { a: 1.0, b: 0.05 }),
    }
}

#[test]
fn series_equals_general_engine() {
    let model = tabulated_model();
    let cm = CircleCovModel::from_linear(&model).unwrap();
    for (t1, p1, t2, p2) in [(5.0, 0.0, 5.0, 0.3), (5.5, 1.0, 6.5, -2.0), (7.0, 3.0, 6.2, 0.1)] {
        let series = cov_full_angle(&cm, t1, p1, t2, p2);
        let q = ModelMomentQuery::new(model.clone(), vec![Point::new(t1, p1), Point::new(t2, p2)]);
        let engine = cov_linear(&q).unwrap();
        assert!((series - engine).abs() <= 1e-6 * engine.abs().max(1e-3), "{series} vs {engine}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_invariance(t1 in 5.0..8.0f64, t2 in 5.0..8.0f64, p1 in -PI..PI, p2 in -PI..PI, rot in -10.0..10.0f64) {
        let cm = CircleCovModel::from_linear(&tabulated_model()).unwrap();
        let a = cov_full_angle(&cm, t1, p1, t2, p2);
        let b = cov_full_angle(&cm, t1, p1 + rot, t2, p2 + rot);
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn target_families_are_psd(p in 1u32..4, alpha in 0.05..5.0f64, beta in 0.05..5.0f64, t in 2.0..20.0f64) {
        let params = PthOrderParams { p, alpha, beta };
        let lam = params.lambdas(40);
        let lag = Schedule::constant(1.5);
        let control = ControlMeasure::Linear { a: 0.3 };
        let w = coeffs_from_target(&[t], &[lam.clone()], &control, &lag).unwrap();
        let m = CircleCovModel::new(w, lag, control, 1.0);
        prop_assert!(min_eigenvalue(angle_covariance_matrix(&m, t, 32)) >= -1e-8);
        for k in 0..=40 {
            prop_assert!((m.tau(t, t, k) - lam[k]).abs() <= 1e-10 * lam[k].max(1e-300));
        }
    }

    #[test]
    fn random_targets_round_trip(lam in proptest::collection::vec(0.0..3.0f64, 1..12), t in 1.0..9.0f64) {
        let lag = Schedule::constant(0.8);
        let control = ControlMeasure::lebesgue();
        let w = coeffs_from_target(&[0.0], &[lam.clone()], &control, &lag).unwrap();
        let m = CircleCovModel::new(w, lag, control, 1.0);
        for (k, l) in lam.iter().enumerate() {
            prop_assert!((m.tau(t, t, k) - l).abs() <= 1e-10 * l.max(1e-300));
        }
    }
}
