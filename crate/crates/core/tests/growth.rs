use std::f64::consts::PI;

use levy_growth::ambit::AmbitFamily;
use levy_growth::discretize::{integrate_field, AmbitWeight, Discretization};
use levy_growth::growth::*;
use levy_growth::levy::{BasisSpec, ControlMeasure, GridSpec, SpotLaw};
use levy_growth::schedule::Schedule;
use levy_growth::weight::WeightFunction;
use levy_growth::Error;

fn rate_linear(spot: SpotLaw, weight: f64, drift: f64) -> GrowthModelSpec {
    GrowthModelSpec {
        kind: GrowthKind::RateLinear,
        basis: BasisSpec::new(spot, ControlMeasure::lebesgue()),
        ambit: AmbitFamily::Rectangular { half_width: Schedule::constant(0.4), lag: Schedule::constant(1.0) },
        weight: WeightFunction::constant(weight),
        drift: DriftFunction::Constant { value: drift },
        initial: InitialProfile::Constant { value: 2.0 },
        multiplier: None,
    }
}

#[test]
fn zero_weight_gives_linear_drift() {
    let spec = rate_linear(SpotLaw::Gaussian { drift: 0.0, variance: 1.0 }, 0.0, 0.7);
    let grid = GridSpec::new(32, 0.25, 0.0, 10.0).unwrap();
    let h = simulate(&spec, &grid, 5, &[3.0, 10.0]).unwrap();
    for (t, row) in h.times.iter().zip(&h.radii) {
        assert_eq!(row.len(), 32);
        for r in row {
            assert!((r - (2.0 + 0.7 * t)).abs() < 1e-12);
        }
    }
}

#[test]
fn identical_seed_is_bit_identical() {
    let spec = example_preset("ex4").unwrap();
    let (grid, times) = preset_grid("ex4", 64, 0.5).unwrap();
    let a = simulate(&spec, &grid, 99, &times).unwrap();
    let b = simulate(&spec, &grid, 99, &times).unwrap();
    assert_eq!(a, b);
    let c = simulate(&spec, &grid, 100, &times).unwrap();
    assert_ne!(a.radii, c.radii);
}

#[test]
fn rate_linear_jump_basis_is_monotone() {
    for spot in [SpotLaw::Gamma { shape: 2.0, rate: 1.0 }, SpotLaw::InverseGaussian { eta: 1.0, gamma: 2.0 }, SpotLaw::Poisson] {
        let spec = rate_linear(spot, 0.5, 0.1);
        assert!(spec.monotone_by_construction());
        let grid = GridSpec::new(48, 0.2, 0.0, 8.0).unwrap();
        let times: Vec<f64> = (1..=8).map(f64::from).collect();
        let h = simulate(&spec, &grid, 11, &times).unwrap();
        for w in h.radii.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                assert!(b >= a);
            }
        }
    }
}

#[test]
fn tumour_profiles_are_positive() {
    let spec = example_preset("tumour").unwrap();
    let (grid, times) = preset_grid("tumour", 64, 0.5).unwrap();
    let h = simulate(&spec, &grid, 3, &times).unwrap();
    assert!(h.radii.iter().flatten().all(|r| *r > 0.0 && r.is_finite()));
}

#[test]
fn exponential_model_rejects_divergent_kumulant() {
    let mut spec = example_preset("tumour").unwrap();
    spec.basis.spot = SpotLaw::Gamma { shape: 1.0, rate: 0.01 };
    let (grid, times) = preset_grid("tumour", 64, 0.5).unwrap();
    assert!(matches!(simulate(&spec, &grid, 3, &times), Err(Error::KumulantDomain { .. })));
    spec.basis.spot = SpotLaw::Poisson;
    assert!(matches!(simulate(&spec, &grid, 3, &times), Err(Error::WrongBasisKind { .. })));
}

#[test]
fn outburst_sum_matches_grid_integral() {
    let mut spec = example_preset("ex3").unwrap();
    spec.ambit = AmbitFamily::WedgeOverS { theta: 0.5, lag: 1.0 };
    let grid = GridSpec::new(64, 0.25, 0.0, 6.0).unwrap();
    let t = 5.0;
    let view = poisson_outburst_view(&spec, &grid, 21, t).unwrap();
    assert!(!view.points.is_empty());
    for (j, phi) in grid.angles().into_iter().enumerate() {
        let field = AmbitWeight { family: spec.ambit.clone(), weight: spec.weight.clone(), t, phi };
        let direct = integrate_field(&field, &view.realization, Discretization::default()).unwrap();
        assert_eq!(direct, view.rates[j], "angle {j}");
    }
    let gauss = example_preset("ex4").unwrap();
    assert!(matches!(poisson_outburst_view(&gauss, &grid, 1, 5.0), Err(Error::WrongBasisKind { .. })));
}

#[test]
fn single_outburst_counts_once() {
    // Before any atom arrives the rate term vanishes.
    let spec = example_preset("ex3").unwrap();
    let grid = GridSpec::new(16, 0.5, 0.0, 2.0).unwrap();
    let view = poisson_outburst_view(&spec, &grid, 0, 0.0).unwrap();
    assert!(view.rates.iter().all(|r| *r == 0.0));
}

#[test]
fn direct_scaled_applies_multiplier() {
    let base = example_preset("ex4").unwrap();
    let scaled = example_preset("ex6").unwrap();
    let (grid, times) = preset_grid("ex4", 64, 0.5).unwrap();
    let a = simulate(&base, &grid, 8, &times).unwrap();
    let b = simulate(&scaled, &grid, 8, &times).unwrap();
    for (ra, rb) in a.radii.iter().zip(&b.radii) {
        for (j, phi) in grid.angles().into_iter().enumerate() {
            let f = 0.35 * (levy_growth::ambit::cyc_dist(phi, PI) / PI).exp();
            assert!((rb[j] - f * ra[j]).abs() < 1e-9 * (1.0 + ra[j].abs()));
        }
    }
}
