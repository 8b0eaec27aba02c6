use std::f64::consts::PI;

use super::{BasisRealization, BasisSpec};
use crate::ambit::{cyc_dist, AmbitFamily};
use crate::discretize::{integrate_field, Discretization, WeightField};
use crate::error::{invalid, Error, Result};

/// A bounded region of the cylinder.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    /// The arc [theta_lo, theta_lo + width] times [s_lo, s_hi].
    Box { theta_lo: f64, width: f64, s_lo: f64, s_hi: f64 },
    Ambit { family: &'a AmbitFamily, t: f64, phi: f64 },
}

impl Region<'_> {
    fn validate(&self) -> Result<()> {
        match *self {
            Region::Box { theta_lo, width, s_lo, s_hi } => {
                if !s_lo.is_finite() || !s_hi.is_finite() {
                    return Err(Error::UnboundedRegion);
                }
                if !(width >= 0.0 && theta_lo.is_finite() && s_hi >= s_lo) {
                    return Err(invalid("box needs a non-negative width and s_lo <= s_hi"));
                }
                Ok(())
            }
            Region::Ambit { family, t, .. } => {
                if !t.is_finite() {
                    return Err(Error::UnboundedRegion);
                }
                family.validate()
            }
        }
    }
}

struct RegionField<'a, F> {
    region: Region<'a>,
    f: F,
}

impl<F: Fn(f64, f64) -> f64 + Sync> WeightField for RegionField<'_, F> {
    fn weight(&self, theta: f64, s: f64) -> Option<f64> {
        let inside = match self.region {
            Region::Box { theta_lo, width, s_lo, s_hi } => {
                s >= s_lo && s <= s_hi && (width >= 2.0 * PI || cyc_dist(theta, theta_lo + 0.5 * width) <= 0.5 * width)
            }
            Region::Ambit { family, t, phi } => family.contains(t, phi, theta, s),
        };
        inside.then(|| (self.f)(theta, s))
    }

    fn time_support(&self) -> (f64, f64) {
        match self.region {
            Region::Box { s_lo, s_hi, .. } => (s_lo, s_hi),
            Region::Ambit { family, t, .. } => family.window(t),
        }
    }

    fn center(&self) -> f64 {
        match self.region {
            Region::Box { theta_lo, width, .. } => theta_lo + 0.5 * width,
            Region::Ambit { phi, .. } => phi,
        }
    }

    fn reach_on(&self, lo: f64, hi: f64) -> f64 {
        match self.region {
            Region::Box { width, .. } => (0.5 * width).min(PI),
            Region::Ambit { family, t, .. } => family.max_halfwidth_on(t, lo, hi),
        }
    }
}

/// μ(region).
pub fn measure_of(region: &Region, basis: &BasisSpec) -> Result<f64> {
    region.validate()?;
    Ok(match *region {
        Region::Box { width, s_lo, s_hi, .. } => width.min(2.0 * PI) * basis.control.mass(s_lo, s_hi),
        Region::Ambit { family, t, .. } => family.measure(t, &basis.control),
    })
}

/// ∫_region f dZ on one draw of the basis.
pub fn integrate(
    f: impl Fn(f64, f64) -> f64 + Sync,
    region: &Region,
    z: &BasisRealization,
    disc: Discretization,
) -> Result<f64> {
    region.validate()?;
    integrate_field(&RegionField { region: *region, f }, z, disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{sample_realization, ControlMeasure, GridSpec, SpotLaw};

    #[test]
    fn box_integral_adds_cells() {
        let grid = GridSpec::new(16, 1.0, 0.0, 4.0).unwrap();
        let basis = BasisSpec::new(SpotLaw::Gamma { shape: 2.0, rate: 1.0 }, ControlMeasure::lebesgue());
        let z = sample_realization(&basis, &grid, 9).unwrap();
        let dphi = grid.dphi();
        let region = Region::Box { theta_lo: grid.angle(2), width: 3.0 * dphi, s_lo: 1.0, s_hi: 3.0 };
        let v = integrate(|_, _| 1.0, &region, &z, Discretization::default()).unwrap();
        let direct: f64 = (1..3).flat_map(|r| (2..5).map(move |j| (r, j))).map(|(r, j)| z.increment(r, j)).sum();
        assert!((v - direct).abs() < 1e-12);
        assert!((measure_of(&region, &basis).unwrap() - 6.0 * dphi).abs() < 1e-12);
    }

    #[test]
    fn unbounded_box_is_rejected() {
        let basis = BasisSpec::new(SpotLaw::Poisson, ControlMeasure::lebesgue());
        let region = Region::Box { theta_lo: 0.0, width: 1.0, s_lo: f64::NEG_INFINITY, s_hi: 1.0 };
        assert!(matches!(measure_of(&region, &basis), Err(Error::UnboundedRegion)));
    }
}
