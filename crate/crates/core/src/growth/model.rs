use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ambit::{cyc_dist, AmbitFamily};
use crate::error::{invalid, Error, Result};
use crate::levy::BasisSpec;
use crate::schedule::Schedule;
use crate::weight::WeightFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthKind {
    /// ∂R/∂t = μ_t + ∫_{A_t} f_t dZ.
    RateLinear,
    /// R = μ_t + ∫_{A_t} f_t dZ.
    DirectRadial,
    /// R = f(φ)(μ_t + ∫_{A_t} f_t dZ).
    DirectScaled,
    /// ∂ log R/∂t = μ_t + ∫_{A_t} f_t dZ.
    RateOfLog,
    /// R = exp(μ_t + ∫_{A_t} f_t dZ) with the two-band tumour kernel.
    ExponentialTumour,
}

impl GrowthKind {
    pub fn is_rate(self) -> bool {
        matches!(self, GrowthKind::RateLinear | GrowthKind::RateOfLog)
    }
}

/// μ_t(φ). Direct models use the value, rate models its integral from 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DriftFunction {
    Constant { value: f64 },
    /// Piecewise constant in t, as in [`Schedule::Steps`].
    Table { knots: Vec<f64>, values: Vec<f64> },
    /// Piecewise constant in t with one value per grid angle.
    AngleTable { knots: Vec<f64>, rows: Vec<Vec<f64>> },
    /// Rate κ0 η e^{−γt} exp[(η/γ)(1 − e^{−γt})].
    Gompertz { kappa0: f64, eta: f64, gamma: f64 },
}

impl Default for DriftFunction {
    fn default() -> Self {
        DriftFunction::Constant { value: 0.0 }
    }
}

fn step_index(knots: &[f64], t: f64) -> usize {
    knots.partition_point(|&k| k <= t).saturating_sub(1)
}

/// ∫_0^t of a step function with `value(i)` on [knots[i], knots[i+1]) and
/// value(0) before the first knot.
fn step_integral(knots: &[f64], value: impl Fn(usize) -> f64, t: f64) -> f64 {
    let (a, b, sign) = if t >= 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
    let mut total = 0.0;
    let n = knots.len();
    for i in 0..n {
        let lo = if i == 0 { f64::NEG_INFINITY } else { knots[i] };
        let hi = if i + 1 < n { knots[i + 1] } else { f64::INFINITY };
        let (l, h) = (lo.max(a), hi.min(b));
        if h > l {
            total += value(i) * (h - l);
        }
    }
    sign * total
}

impl DriftFunction {
    pub fn validate(&self, n_angles: Option<usize>) -> Result<()> {
        let knots_ok = |k: &[f64]| !k.is_empty() && k.windows(2).all(|w| w[1] > w[0]) && k.iter().all(|x| x.is_finite());
        match self {
            DriftFunction::Constant { value } if !value.is_finite() => Err(invalid("drift must be finite")),
            DriftFunction::Table { knots, values } if !knots_ok(knots) || knots.len() != values.len() => {
                Err(invalid("drift table needs increasing knots and one value per knot"))
            }
            DriftFunction::AngleTable { knots, rows } => {
                if !knots_ok(knots) || knots.len() != rows.len() {
                    return Err(invalid("drift table needs increasing knots and one row per knot"));
                }
                if let Some(n) = n_angles {
                    if rows.iter().any(|r| r.len() != n) {
                        return Err(invalid(format!("drift rows must have {n} entries, one per grid angle")));
                    }
                }
                Ok(())
            }
            DriftFunction::Gompertz { kappa0, eta, gamma } => {
                if kappa0.is_finite() && eta.is_finite() && gamma.is_finite() && *gamma != 0.0 {
                    Ok(())
                } else {
                    Err(invalid("Gompertz drift needs finite parameters and gamma != 0"))
                }
            }
            _ => Ok(()),
        }
    }

    /// μ_t(φ_j).
    pub fn value(&self, t: f64, j: usize) -> f64 {
        match self {
            DriftFunction::Constant { value } => *value,
            DriftFunction::Table { knots, values } => values[step_index(knots, t)],
            DriftFunction::AngleTable { knots, rows } => rows[step_index(knots, t)][j],
            DriftFunction::Gompertz { kappa0, eta, gamma } => {
                let e = (-gamma * t).exp();
                kappa0 * eta * e * ((eta / gamma) * (1.0 - e)).exp()
            }
        }
    }

    /// μ̄_t(φ_j) = ∫_0^t μ_s(φ_j) ds.
    pub fn integral(&self, t: f64, j: usize) -> f64 {
        match self {
            DriftFunction::Constant { value } => value * t,
            DriftFunction::Table { knots, values } => step_integral(knots, |i| values[i], t),
            DriftFunction::AngleTable { knots, rows } => step_integral(knots, |i| rows[i][j], t),
            DriftFunction::Gompertz { kappa0, eta, gamma } => {
                kappa0 * ((eta / gamma) * (-(-gamma * t).exp_m1())).exp_m1()
            }
        }
    }

    fn is_nonnegative(&self) -> bool {
        match self {
            DriftFunction::Constant { value } => *value >= 0.0,
            DriftFunction::Table { values, .. } => values.iter().all(|v| *v >= 0.0),
            DriftFunction::AngleTable { rows, .. } => rows.iter().flatten().all(|v| *v >= 0.0),
            DriftFunction::Gompertz { kappa0, eta, .. } => *kappa0 >= 0.0 && *eta >= 0.0,
        }
    }
}

/// Angular multiplier f(φ) applied outside the integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AngularMultiplier {
    Constant { value: f64 },
    /// scale · exp(d(φ, center)/π), with d the cyclic distance.
    ExpDistance { scale: f64, center: f64 },
    /// One value per grid angle.
    Table { values: Vec<f64> },
}

impl AngularMultiplier {
    pub fn eval(&self, phi: f64, j: usize) -> f64 {
        match self {
            AngularMultiplier::Constant { value } => *value,
            AngularMultiplier::ExpDistance { scale, center } => scale * (cyc_dist(phi, *center) / PI).exp(),
            AngularMultiplier::Table { values } => values[j],
        }
    }
}

/// R₀(φ) for rate models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialProfile {
    Constant { value: f64 },
    Table { values: Vec<f64> },
}

impl Default for InitialProfile {
    fn default() -> Self {
        InitialProfile::Constant { value: 1.0 }
    }
}

impl InitialProfile {
    pub fn eval(&self, j: usize) -> f64 {
        match self {
            InitialProfile::Constant { value } => *value,
            InitialProfile::Table { values } => values[j],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthModelSpec {
    pub kind: GrowthKind,
    pub basis: BasisSpec,
    pub ambit: AmbitFamily,
    pub weight: WeightFunction,
    #[serde(default)]
    pub drift: DriftFunction,
    #[serde(default)]
    pub initial: InitialProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<AngularMultiplier>,
}

impl GrowthModelSpec {
    pub fn validate(&self, n_angles: usize) -> Result<()> {
        self.basis.validate()?;
        self.ambit.validate()?;
        self.weight.validate()?;
        self.drift.validate(Some(n_angles))?;
        match (&self.kind, &self.multiplier) {
            (GrowthKind::DirectScaled, None) => return Err(invalid("direct-scaled models need a multiplier")),
            (GrowthKind::DirectScaled, _) => {}
            (_, Some(_)) => return Err(invalid("a multiplier is only used by direct-scaled models")),
            _ => {}
        }
        if let Some(AngularMultiplier::Table { values }) = &self.multiplier {
            if values.len() != n_angles {
                return Err(invalid(format!("multiplier table must have {n_angles} entries")));
            }
        }
        if let InitialProfile::Table { values } = &self.initial {
            if values.len() != n_angles {
                return Err(invalid(format!("initial profile must have {n_angles} entries")));
            }
        }
        if self.kind == GrowthKind::ExponentialTumour {
            if self.basis.spot.is_poisson() {
                return Err(Error::WrongBasisKind { expected: "Gaussian, Gamma or inverse Gaussian" });
            }
            if !matches!(self.ambit, AmbitFamily::Tumour { .. }) || !matches!(self.weight, WeightFunction::Tumour { .. }) {
                return Err(invalid("the exponential tumour model needs the tumour ambit family and weight"));
            }
        }
        Ok(())
    }

    /// Whether every realization must grow monotonically: a rate-linear
    /// model with a non-negative basis, weight and drift.
    pub fn monotone_by_construction(&self) -> bool {
        self.kind == GrowthKind::RateLinear
            && !self.basis.spot.is_gaussian()
            && matches!(self.weight, WeightFunction::Constant { value } if value >= 0.0)
            && self.drift.is_nonnegative()
    }
}

/// One row of the tumour parameter table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TumourRow {
    pub t: f64,
    pub lag: f64,
    pub band: f64,
    pub alpha: f64,
    pub beta: f64,
    pub phi0: f64,
}

/// Per-time tumour parameters, piecewise constant between rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TumourParams {
    pub rows: Vec<TumourRow>,
    pub drift: DriftFunction,
}

impl TumourParams {
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || self.rows.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(invalid("tumour rows must be non-empty with increasing t"));
        }
        for r in &self.rows {
            if !(r.band > 0.0 && r.band <= r.lag && r.lag <= r.t) {
                return Err(invalid(format!("tumour row t = {}: need 0 < t0 <= T <= t", r.t)));
            }
            if !(r.phi0 > 0.0 && r.phi0 <= 2.0 * PI) {
                return Err(invalid(format!("tumour row t = {}: phi0 must lie in (0, 2π]", r.t)));
            }
        }
        self.drift.validate(None)
    }

    fn schedule(&self, f: impl Fn(&TumourRow) -> f64) -> Schedule {
        Schedule::Steps { knots: self.rows.iter().map(|r| r.t).collect(), values: self.rows.iter().map(f).collect() }
    }

    pub fn ambit(&self) -> AmbitFamily {
        AmbitFamily::Tumour { lag: self.schedule(|r| r.lag), band: self.schedule(|r| r.band), phi0: self.schedule(|r| r.phi0) }
    }

    pub fn weight(&self) -> WeightFunction {
        WeightFunction::Tumour { alpha: self.schedule(|r| r.alpha), beta: self.schedule(|r| r.beta), band: self.schedule(|r| r.band) }
    }

    pub fn model(&self, basis: BasisSpec) -> Result<GrowthModelSpec> {
        self.validate()?;
        Ok(GrowthModelSpec {
            kind: GrowthKind::ExponentialTumour,
            basis,
            ambit: self.ambit(),
            weight: self.weight(),
            drift: self.drift.clone(),
            initial: InitialProfile::default(),
            multiplier: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gompertz_integral_differentiates_to_rate() {
        let d = DriftFunction::Gompertz { kappa0: 0.8, eta: 1.5, gamma: 0.3 };
        for t in [0.5, 2.0, 7.0] {
            let h = 1e-5;
            let num = (d.integral(t + h, 0) - d.integral(t - h, 0)) / (2.0 * h);
            assert!((num - d.value(t, 0)).abs() < 1e-7);
        }
        assert_eq!(d.integral(0.0, 0), 0.0);
    }

    #[test]
    fn step_drift_integral() {
        let d = DriftFunction::Table { knots: vec![2.0, 5.0], values: vec![1.0, 3.0] };
        assert!((d.integral(4.0, 0) - 4.0).abs() < 1e-12);
        assert!((d.integral(7.0, 0) - (5.0 + 6.0)).abs() < 1e-12);
    }

    #[test]
    fn multiplier_peaks_opposite_center() {
        let m = AngularMultiplier::ExpDistance { scale: 0.35, center: PI };
        assert!((m.eval(0.0, 0) - 0.35 * 1f64.exp()).abs() < 1e-15);
        assert!((m.eval(-PI, 0) - 0.35).abs() < 1e-15);
    }
}
