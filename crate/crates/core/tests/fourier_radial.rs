use std::f64::consts::PI;

use levy_growth::ambit::AmbitFamily;
use levy_growth::fourier_radial::*;
use levy_growth::levy::{BasisSpec, ControlMeasure, SpotLaw};
use levy_growth::moments::LinearModel;
use levy_growth::schedule::Schedule;
use levy_growth::weight::{FourierWeight, WeightFunction};
use levy_growth::Error;
use proptest::prelude::*;

fn model(ambit: AmbitFamily, a: Vec<f64>) -> LinearModel {
    LinearModel {
        weight: WeightFunction::Fourier { coefficients: FourierWeight::Constant { a } },
        ambit,
        basis: BasisSpec::new(SpotLaw::Gaussian { drift: 0.0, variance: 1.0 }, ControlMeasure::lebesgue()),
    }
}

proptest! {
    #[test]
    fn reconstruction_and_parseval(profile in proptest::collection::vec(-5.0..5.0f64, 101)) {
        let n = profile.len();
        let s = radial_fourier(&profile, (n - 1) / 2).unwrap();
        for (j, r) in profile.iter().enumerate() {
            let phi = -PI + 2.0 * PI * j as f64 / n as f64;
            prop_assert!((s.reconstruct(phi) - r).abs() <= 1e-10);
        }
        let e = profile_energy(&profile);
        prop_assert!((s.energy() - e).abs() <= 1e-8 * e.max(1e-12));
    }
}

#[test]
fn covariance_structure() {
    let full = model(AmbitFamily::FullAngle { lag: Schedule::constant(2.0) }, vec![0.5, 1.0, 0.3]);
    assert_eq!(fourier_cov_structure(&full, 5.0, 5.5, 1, 2).unwrap(), (0.0, 0.0, 0.0));
    let (aa, bb, ab) = fourier_cov_structure(&full, 5.0, 5.5, 2, 2).unwrap();
    let tau = PI * 0.09 * 1.5;
    assert!((aa - tau).abs() < 1e-12 && (bb - tau).abs() < 1e-12 && ab == 0.0);
    let (a0, b0, _) = fourier_cov_structure(&full, 5.0, 5.0, 0, 0).unwrap();
    assert!((a0 - 8.0 * PI * 0.25 * 2.0).abs() < 1e-12 && b0 == 0.0);
    let zero = model(AmbitFamily::FullAngle { lag: Schedule::constant(2.0) }, vec![0.0; 3]);
    assert_eq!(fourier_cov_structure(&zero, 5.0, 5.0, 1, 1).unwrap(), (0.0, 0.0, 0.0));
    let rect = model(
        AmbitFamily::Rectangular { half_width: Schedule::constant(1.0), lag: Schedule::constant(2.0) },
        vec![1.0],
    );
    assert!(matches!(fourier_cov_structure(&rect, 5.0, 5.0, 1, 1), Err(Error::AssumptionViolation(_))));
}
