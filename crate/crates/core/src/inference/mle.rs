use serde::{Deserialize, Serialize};

use super::dataset::ProfileDataset;
use super::fit::{free_indices, FitReport, FreeParameter};
use super::optimize::{minimize_bounded, SearchOptions};
use crate::circle_cov::CircleCovModel;
use crate::error::{Error, Result};
use crate::fourier_radial::{gaussian_loglik_replicates, radial_fourier, FourierSeries};

/// A parametric family of τ_k(t₁, t₂).
pub trait TauFamily: Sync {
    fn names(&self) -> Vec<&'static str>;
    fn defaults(&self) -> Vec<f64>;
    fn tau(&self, params: &[f64], t1: f64, t2: f64, k: usize) -> f64;
}

/// τ_k = scale · τ_k of a fixed full-angle model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledTau {
    pub base: CircleCovModel,
    pub scale: f64,
}

impl TauFamily for ScaledTau {
    fn names(&self) -> Vec<&'static str> {
        vec!["scale"]
    }

    fn defaults(&self) -> Vec<f64> {
        vec![self.scale]
    }

    fn tau(&self, p: &[f64], t1: f64, t2: f64, k: usize) -> f64 {
        p[0] * self.base.tau(t1, t2, k)
    }
}

/// τ_k = scale · λ_k · exp(−rate |t₁ − t₂|).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTau {
    pub lambdas: Vec<f64>,
    pub scale: f64,
    pub rate: f64,
}

impl TauFamily for SeparableTau {
    fn names(&self) -> Vec<&'static str> {
        vec!["scale", "rate"]
    }

    fn defaults(&self) -> Vec<f64> {
        vec![self.scale, self.rate]
    }

    fn tau(&self, p: &[f64], t1: f64, t2: f64, k: usize) -> f64 {
        p[0] * self.lambdas.get(k).copied().unwrap_or(0.0) * (-p[1] * (t1 - t2).abs()).exp()
    }
}

/// Coefficient series per replicate and time. Every time must hold the same
/// number of replicates.
pub fn replicate_series(data: &ProfileDataset, orders: usize) -> Result<Vec<Vec<FourierSeries>>> {
    data.validate()?;
    let reps = data.profiles[0].len();
    if data.profiles.iter().any(|p| p.len() != reps) {
        return Err(Error::InsufficientData("likelihood needs the same replicates at every time".into()));
    }
    (0..reps)
        .map(|r| data.profiles.iter().map(|p| radial_fourier(&p[r], orders)).collect())
        .collect()
}

/// Log-likelihood of the data's orders 1..=K under a family.
pub fn family_loglik(family: &dyn TauFamily, params: &[f64], times: &[f64], series: &[Vec<FourierSeries>], orders: usize) -> Result<f64> {
    gaussian_loglik_replicates(times, series, orders, |a, b, k| family.tau(params, a, b, k))
}

/// Maximize the Fourier-coefficient likelihood over the free parameters.
/// The reported objective and trace are negative log-likelihoods.
pub fn fit_fourier_mle(
    family: &dyn TauFamily,
    data: &ProfileDataset,
    orders: usize,
    free: &[FreeParameter],
    opts: &SearchOptions,
) -> Result<FitReport> {
    let series = replicate_series(data, orders)?;
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
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    family_loglik(family, &full(&mid), &data.times, &series, orders)?;
    let objective = |x: &[f64]| match family_loglik(family, &full(x), &data.times, &series, orders) {
        Ok(ll) => -ll,
        Err(_) => f64::INFINITY,
    };
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
