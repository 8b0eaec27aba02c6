//! Method-of-moments fitting: per observed time, the variance and the
//! spatial covariances on the lag ladder are matched, each divided by the
//! empirical variance at that time, with equal weights.

use serde::{Deserialize, Serialize};

use super::dataset::ProfileDataset;
use super::empirical::{empirical_moments, EmpiricalMoments};
use super::optimize::{minimize_bounded, SearchOptions};
use crate::ambit::AmbitFamily;
use crate::error::{invalid, Error, Result};
use crate::growth::TumourRow;
use crate::levy::{BasisSpec, ControlMeasure};
use crate::moments::{cov_linear, LinearModel, ModelMomentQuery, Point};
use crate::schedule::Schedule;
use crate::weight::WeightFunction;

/// A parametric model whose spatial covariances are known in closed form.
pub trait MomentFamily: Sync {
    fn names(&self) -> Vec<&'static str>;
    /// Parameter values used for anything not declared free.
    fn defaults(&self) -> Vec<f64>;
    /// Cov(Y_t(0), Y_t(d)) for each lag d, where Y is the matched variable.
    fn covariances(&self, params: &[f64], t: f64, lags: &[f64]) -> Result<Vec<f64>>;
    /// Whether moments are matched on log R.
    fn log_scale(&self) -> bool {
        false
    }
}

/// Direct radial model with a factorizable basis, constant weight 1 and
/// rectangular sets of constant half-width Θ and lag T(t) = c·t.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectRadialFamily {
    pub variance: f64,
    pub half_width: f64,
    pub lag_slope: f64,
    #[serde(default)]
    pub control: ControlMeasure,
}

impl MomentFamily for DirectRadialFamily {
    fn names(&self) -> Vec<&'static str> {
        vec!["variance", "half_width", "lag_slope"]
    }

    fn defaults(&self) -> Vec<f64> {
        vec![self.variance, self.half_width, self.lag_slope]
    }

    fn covariances(&self, p: &[f64], t: f64, lags: &[f64]) -> Result<Vec<f64>> {
        let ambit = AmbitFamily::Rectangular { half_width: Schedule::constant(p[1]), lag: Schedule::linear(p[2], 0.0) };
        Ok(lags.iter().map(|&d| p[0] * ambit.intersection_measure(t, 0.0, t, d, &self.control)).collect())
    }
}

/// log R for the exponential tumour model at one table row, with free
/// (α, β). The two bands are disjoint, so
/// Cov = α²·C_old(d) + β²·C_new(d) with both parts precomputed on `lags`.
#[derive(Clone, Debug)]
pub struct TumourFamily {
    pub row: TumourRow,
    pub basis: BasisSpec,
    lags: Vec<f64>,
    old_band: Vec<f64>,
    new_band: Vec<f64>,
}

impl TumourFamily {
    pub fn new(row: TumourRow, basis: BasisSpec, lags: &[f64]) -> Result<Self> {
        let part = |alpha: f64, beta: f64| -> Result<Vec<f64>> {
            let model = LinearModel {
                weight: WeightFunction::Tumour {
                    alpha: Schedule::constant(alpha),
                    beta: Schedule::constant(beta),
                    band: Schedule::constant(row.band),
                },
                ambit: AmbitFamily::Tumour {
                    lag: Schedule::constant(row.lag),
                    band: Schedule::constant(row.band),
                    phi0: Schedule::constant(row.phi0),
                },
                basis: basis.clone(),
            };
            lags.iter()
                .map(|&d| cov_linear(&ModelMomentQuery::new(model.clone(), vec![Point::new(row.t, 0.0), Point::new(row.t, d)])))
                .collect()
        };
        Ok(TumourFamily { row, basis: basis.clone(), lags: lags.to_vec(), old_band: part(1.0, 0.0)?, new_band: part(0.0, 1.0)? })
    }
}

impl MomentFamily for TumourFamily {
    fn names(&self) -> Vec<&'static str> {
        vec!["alpha", "beta"]
    }

    fn defaults(&self) -> Vec<f64> {
        vec![self.row.alpha, self.row.beta]
    }

    fn covariances(&self, p: &[f64], t: f64, lags: &[f64]) -> Result<Vec<f64>> {
        if (t - self.row.t).abs() > 1e-9 || lags != self.lags.as_slice() {
            return Err(invalid("tumour family was built for another time or lag ladder"));
        }
        Ok(self.old_band.iter().zip(&self.new_band).map(|(c1, c2)| p[0] * p[0] * c1 + p[1] * p[1] * c2).collect())
    }

    fn log_scale(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParameter {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl FreeParameter {
    pub fn new(name: &str, lo: f64, hi: f64) -> Self {
        FreeParameter { name: name.to_string(), lo, hi }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub names: Vec<String>,
    pub estimates: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// All parameters, free and fixed, in family order.
    pub parameters: Vec<(String, f64)>,
    pub objective: f64,
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
    pub non_identifiable: bool,
}

impl FitReport {
    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.estimates[i])
    }
}

/// Indices of the free parameters in family order.
pub(crate) fn free_indices(names: &[&'static str], free: &[FreeParameter]) -> Result<Vec<usize>> {
    if free.is_empty() {
        return Err(Error::InfeasibleBounds("no free parameters".into()));
    }
    free.iter()
        .map(|f| {
            names
                .iter()
                .position(|n| *n == f.name)
                .ok_or_else(|| invalid(format!("unknown parameter `{}`; expected one of {names:?}", f.name)))
        })
        .collect()
}

/// The moment-matching objective for full parameter vector `p`.
pub fn moment_objective(family: &dyn MomentFamily, emp: &EmpiricalMoments, p: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    for (i, &t) in emp.times.iter().enumerate() {
        let v = emp.variance[i];
        if !(v > 0.0) {
            return Err(Error::InsufficientData(format!("zero empirical variance at t = {t}")));
        }
        let model = family.covariances(p, t, &emp.lags)?;
        for (e, m) in emp.spatial[i].iter().zip(&model) {
            total += ((e - m) / v).powi(2);
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Analytic moments of a family, shaped like empirical ones.
pub fn family_moments(family: &dyn MomentFamily, p: &[f64], template: &EmpiricalMoments) -> Result<EmpiricalMoments> {
    let mut out = template.clone();
    for (i, &t) in template.times.iter().enumerate() {
        out.spatial[i] = family.covariances(p, t, &template.lags)?;
        out.variance[i] = out.spatial[i][0];
    }
    Ok(out)
}

pub fn fit_moments(
    family: &dyn MomentFamily,
    data: &ProfileDataset,
    free: &[FreeParameter],
    opts: &SearchOptions,
) -> Result<FitReport> {
    let data = if family.log_scale() { data.log()? } else { data.clone() };
    let emp = empirical_moments(&data)?;
    fit_moments_to(family, &emp, free, opts)
}

/// Fit against precomputed moments.
pub fn fit_moments_to(
    family: &dyn MomentFamily,
    emp: &EmpiricalMoments,
    free: &[FreeParameter],
    opts: &SearchOptions,
) -> Result<FitReport> {
    let names = family.names();
    let idx = free_indices(&names, free)?;
    let base = family.defaults();
    let lo: Vec<f64> = free.iter().map(|f| f.lo).collect();
    let hi: Vec<f64> = free.iter().map(|f| f.hi).collect();
    let full = |x: &[f64]| {
        let mut p = base.clone();
        for (&i, &v) in idx.iter().zip(x) {
            p[i] = v;
        }
        p
    };
    // Surface data errors before searching.
    moment_objective(family, emp, &full(&lo))?;
    let objective = |x: &[f64]| moment_objective(family, emp, &full(x)).unwrap_or(f64::INFINITY);
    let r = minimize_bounded(objective, &lo, &hi, None, opts)?;
    let p = full(&r.x);
    Ok(FitReport {
        names: free.iter().map(|f| f.name.clone()).collect(),
        estimates: r.x,
        lower: lo,
        upper: hi,
        parameters: names.iter().map(|n| n.to_string()).zip(p).collect(),
        objective: r.value,
        trace: r.trace,
        evaluations: r.evaluations,
        converged: r.converged,
        non_identifiable: r.non_identifiable,
    })
}
