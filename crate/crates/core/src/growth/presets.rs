use std::f64::consts::PI;

use super::matching::{moment_match_gamma, moment_match_ig};
use super::model::{
    AngularMultiplier, DriftFunction, GrowthKind, GrowthModelSpec, InitialProfile, TumourParams, TumourRow,
};
use crate::ambit::AmbitFamily;
use crate::error::{Error, Result};
use crate::levy::{BasisSpec, ControlMeasure, GridSpec, SpotLaw};
use crate::schedule::Schedule;
use crate::weight::WeightFunction;

pub const PRESET_IDS: &[&str] = &["ex3", "ex4", "ex4-wide", "ex5", "ex5-ig", "ex6", "tumour"];

/// Output times of the direct radial examples.
pub const DIRECT_TIMES: [f64; 3] = [20.0, 45.0, 80.0];
/// Mean radius of the direct radial examples at [`DIRECT_TIMES`].
pub const DIRECT_MEANS: [f64; 3] = [16.0, 24.0, 32.0];
pub const DIRECT_VARIANCE: f64 = 1.0;
pub const NARROW_HALF_WIDTH: f64 = PI / 100.0;
pub const WIDE_HALF_WIDTH: f64 = PI / 5.0;
pub const LAG_SLOPE: f64 = 0.2;

/// Rows of the published tumour parameter table.
pub const TUMOUR_ROWS: [TumourRow; 3] = [
    TumourRow { t: 21.0, lag: 21.0, band: 19.0, alpha: 0.04, beta: -0.033, phi0: 0.19 },
    TumourRow { t: 25.0, lag: 25.0, band: 17.0, alpha: 0.02, beta: -0.033, phi0: 0.19 },
    TumourRow { t: 55.0, lag: 18.0, band: 4.0, alpha: 0.01, beta: -0.067, phi0: 0.23 },
];

fn rect_ambit(half_width: f64) -> AmbitFamily {
    AmbitFamily::Rectangular {
        half_width: Schedule::constant(half_width),
        lag: Schedule::linear(LAG_SLOPE, 0.0),
    }
}

/// μ(A_t(0)) for the direct radial examples.
pub fn direct_measure(half_width: f64, t: f64) -> f64 {
    2.0 * half_width * LAG_SLOPE * t
}

/// Gaussian direct radial model with E R_t = μ_t and 𝕍 R_t = σ² μ(A_t).
pub fn direct_radial(half_width: f64, variance: f64, means: &[f64]) -> GrowthModelSpec {
    GrowthModelSpec {
        kind: GrowthKind::DirectRadial,
        basis: BasisSpec::new(SpotLaw::Gaussian { drift: 0.0, variance }, ControlMeasure::lebesgue()),
        ambit: rect_ambit(half_width),
        weight: WeightFunction::constant(1.0),
        drift: DriftFunction::Table { knots: DIRECT_TIMES.to_vec(), values: means.to_vec() },
        initial: InitialProfile::default(),
        multiplier: None,
    }
}

/// The direct radial model with a Gamma basis matched to the Gaussian one.
pub fn direct_gamma(half_width: f64, variance: f64, shape: f64, means: &[f64]) -> GrowthModelSpec {
    let mut drift = Vec::with_capacity(DIRECT_TIMES.len());
    let mut rate = 0.0;
    for (&t, &mu) in DIRECT_TIMES.iter().zip(means) {
        let (m, a) = moment_match_gamma(mu, variance, shape, direct_measure(half_width, t));
        drift.push(m);
        rate = a;
    }
    GrowthModelSpec {
        basis: BasisSpec::new(SpotLaw::Gamma { shape, rate }, ControlMeasure::lebesgue()),
        drift: DriftFunction::Table { knots: DIRECT_TIMES.to_vec(), values: drift },
        ..direct_radial(half_width, variance, means)
    }
}

/// The direct radial model with an inverse Gaussian basis whose Z(A_t)
/// has mean `eta`/γ·m and the Gaussian run's variance. With γ fixed by the
/// variance density, the drift absorbs the remaining mean.
pub fn direct_ig(half_width: f64, variance: f64, eta: f64, means: &[f64]) -> GrowthModelSpec {
    // Per unit measure: mean e = η/γ, variance v = η/γ³ = σ². Fix η, solve γ.
    let gamma = (eta / variance).cbrt();
    let mut drift = Vec::with_capacity(DIRECT_TIMES.len());
    for (&t, &mu) in DIRECT_TIMES.iter().zip(means) {
        let m = direct_measure(half_width, t);
        let (eta2, gamma2) = moment_match_ig(eta / gamma * m, variance * m, m);
        debug_assert!((eta2 - eta).abs() < 1e-9 * eta && (gamma2 - gamma).abs() < 1e-9 * gamma);
        drift.push(mu - eta / gamma * m);
    }
    GrowthModelSpec {
        basis: BasisSpec::new(SpotLaw::InverseGaussian { eta, gamma }, ControlMeasure::lebesgue()),
        drift: DriftFunction::Table { knots: DIRECT_TIMES.to_vec(), values: drift },
        ..direct_radial(half_width, variance, means)
    }
}

/// Parameters of a named preset. `tumour` uses drift 0; supply μ_t through
/// configuration.
pub fn example_preset(id: &str) -> Result<GrowthModelSpec> {
    Ok(match id {
        "ex3" => GrowthModelSpec {
            kind: GrowthKind::RateLinear,
            basis: BasisSpec::new(SpotLaw::Poisson, ControlMeasure::Linear { a: 10.0 }),
            ambit: AmbitFamily::WedgeOverS { theta: 0.5, lag: 1.0 },
            weight: WeightFunction::constant(1.0),
            drift: DriftFunction::Constant { value: 0.0 },
            initial: InitialProfile::Constant { value: 0.0 },
            multiplier: None,
        },
        "ex4" => direct_radial(NARROW_HALF_WIDTH, DIRECT_VARIANCE, &DIRECT_MEANS),
        "ex4-wide" => direct_radial(WIDE_HALF_WIDTH, DIRECT_VARIANCE, &DIRECT_MEANS),
        "ex5" => direct_gamma(NARROW_HALF_WIDTH, DIRECT_VARIANCE, 1.0, &DIRECT_MEANS),
        "ex5-ig" => direct_ig(NARROW_HALF_WIDTH, DIRECT_VARIANCE, 1.0, &DIRECT_MEANS),
        "ex6" => GrowthModelSpec {
            kind: GrowthKind::DirectScaled,
            multiplier: Some(AngularMultiplier::ExpDistance { scale: 0.35, center: PI }),
            ..direct_radial(NARROW_HALF_WIDTH, DIRECT_VARIANCE, &DIRECT_MEANS)
        },
        "tumour" => TumourParams { rows: TUMOUR_ROWS.to_vec(), drift: DriftFunction::Constant { value: 0.0 } }
            .model(BasisSpec::new(SpotLaw::Gaussian { drift: 0.0, variance: 1.0 }, ControlMeasure::lebesgue()))?,
        _ => return Err(Error::UnknownId(id.to_string())),
    })
}

/// A grid and output times that cover every ambit set a preset needs.
pub fn preset_grid(id: &str, n_angles: usize, dt: f64) -> Result<(GridSpec, Vec<f64>)> {
    let (t_min, t_max, times) = match id {
        "ex3" => (0.0, 125.0, vec![75.0, 100.0, 125.0]),
        "ex4" | "ex4-wide" | "ex5" | "ex5-ig" | "ex6" => (0.0, 80.0, DIRECT_TIMES.to_vec()),
        "tumour" => (0.0, 55.0, TUMOUR_ROWS.iter().map(|r| r.t).collect()),
        _ => return Err(Error::UnknownId(id.to_string())),
    };
    Ok((GridSpec::new(n_angles, dt, t_min, t_max)?, times))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for id in PRESET_IDS {
            let spec = example_preset(id).unwrap();
            spec.validate(64).unwrap();
        }
        assert!(matches!(example_preset("ex7"), Err(Error::UnknownId(_))));
    }

    #[test]
    fn matched_presets_share_mean_and_variance() {
        for id in ["ex5", "ex5-ig"] {
            let spec = example_preset(id).unwrap();
            for (i, &t) in DIRECT_TIMES.iter().enumerate() {
                let m = direct_measure(NARROW_HALF_WIDTH, t);
                let mean = spec.drift.value(t, 0) + spec.basis.spot.mean() * m;
                let var = spec.basis.spot.variance() * m;
                assert!((mean - DIRECT_MEANS[i]).abs() < 1e-12, "{id} mean at {t}");
                assert!((var - DIRECT_VARIANCE * m).abs() < 1e-12, "{id} variance at {t}");
            }
        }
    }
}
