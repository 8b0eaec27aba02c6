use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cov_linear, mean_linear, mixed_exp_moment, relative_moment, var_linear, ModelMomentQuery};
use crate::discretize::{integrate_points, support_rows, Discretization, PointKernel, WeightField};
use crate::error::{invalid, Result};
use crate::levy::{sample_rows, GridSpec};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Mean,
    Variance,
    Covariance,
    RelativeMoment,
    MixedExponential,
}

#[derive(Clone, Debug, Serialize)]
pub struct McReport {
    pub statistic: Statistic,
    pub analytic: f64,
    pub mc: f64,
    pub se: f64,
    pub z: f64,
    pub replicates: usize,
}

/// Jackknife estimate and standard error of h(mean of feature vectors).
/// `h` receives the feature means and the sample size they came from.
pub fn jackknife(features: &[Vec<f64>], h: impl Fn(&[f64], usize) -> f64) -> (f64, f64) {
    let n = features.len();
    let d = features.first().map_or(0, Vec::len);
    let mut total = vec![0.0; d];
    for u in features {
        for (t, x) in total.iter_mut().zip(u) {
            *t += x;
        }
    }
    let mean: Vec<f64> = total.iter().map(|t| t / n as f64).collect();
    let est = h(&mean, n);
    if n < 3 {
        return (est, f64::NAN);
    }
    let m = (n - 1) as f64;
    let mut loo = vec![0.0; d];
    let thetas: Vec<f64> = features
        .iter()
        .map(|u| {
            for k in 0..d {
                loo[k] = (total[k] - u[k]) / m;
            }
            h(&loo, n - 1)
        })
        .collect();
    let tbar = thetas.iter().sum::<f64>() / n as f64;
    let ss: f64 = thetas.iter().map(|t| (t - tbar).powi(2)).sum();
    (est, (m / n as f64 * ss).sqrt())
}

fn features(stat: Statistic, x: &[f64], lambdas: &[f64]) -> Vec<f64> {
    match stat {
        Statistic::Mean => vec![x[0]],
        Statistic::Variance => vec![x[0], x[0] * x[0]],
        Statistic::Covariance => vec![x[0], x[1], x[0] * x[1]],
        Statistic::RelativeMoment => vec![x[0].exp(), x[1].exp(), (x[0] + x[1]).exp()],
        Statistic::MixedExponential => vec![x.iter().zip(lambdas).map(|(a, l)| a * l).sum::<f64>().exp()],
    }
}

fn statistic_of(stat: Statistic, m: &[f64], n: usize) -> f64 {
    let bessel = n as f64 / (n as f64 - 1.0);
    match stat {
        Statistic::Mean | Statistic::MixedExponential => m[0],
        Statistic::Variance => bessel * (m[1] - m[0] * m[0]),
        Statistic::Covariance => bessel * (m[2] - m[0] * m[1]),
        Statistic::RelativeMoment => m[2] / (m[0] * m[1]),
    }
}

/// Compare the analytic value of a statistic (in the query's mode) with a
/// Monte Carlo estimate from `n_replicates` independent lattice draws.
/// Replicate r uses seed mix(seed, r).
pub fn mc_verify(
    q: &ModelMomentQuery,
    stat: Statistic,
    n_replicates: usize,
    seed: u64,
    grid: &GridSpec,
    disc: Discretization,
) -> Result<McReport> {
    if n_replicates < 3 {
        return Err(invalid("at least 3 replicates are needed"));
    }
    let k = match stat {
        Statistic::Mean | Statistic::Variance => 1,
        Statistic::Covariance | Statistic::RelativeMoment => 2,
        Statistic::MixedExponential => q.points.len(),
    };
    let analytic = match stat {
        Statistic::Mean => mean_linear(q)?,
        Statistic::Variance => var_linear(q)?,
        Statistic::Covariance => cov_linear(q)?,
        Statistic::RelativeMoment => relative_moment(q)?,
        Statistic::MixedExponential => mixed_exp_moment(q)?,
    };
    let basis = &q.model.basis;
    let fields: Vec<_> = q.points[..k].iter().map(|p| q.model.field(*p)).collect();
    let poisson = basis.spot.is_poisson();
    let mut rows = vec![false; grid.n_rows()];
    for f in &fields {
        for r in support_rows(f as &dyn WeightField, grid, &basis.control)? {
            rows[r] = true;
        }
    }
    let kernels: Vec<PointKernel> = if poisson {
        Vec::new()
    } else {
        fields.iter().map(|f| PointKernel::build(f, grid, basis, disc)).collect::<Result<_>>()?
    };
    let feats: Vec<Vec<f64>> = (0..n_replicates)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let z = sample_rows(basis, grid, rng::mix(seed, r as u64), &rows)?;
            let x: Vec<f64> = if poisson {
                fields.iter().map(|f| integrate_points(f, &z)).collect::<Result<_>>()?
            } else {
                kernels.iter().map(|kern| kern.apply(&z.increments)).collect()
            };
            Ok(features(stat, &x, &q.lambdas))
        })
        .collect::<Result<_>>()?;
    let (mc, se) = jackknife(&feats, |m, n| statistic_of(stat, m, n));
    let z = if se > 0.0 {
        (mc - analytic) / se
    } else if (mc - analytic).abs() <= 1e-12 * (1.0 + analytic.abs()) {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(McReport { statistic: stat, analytic, mc, se, z, replicates: n_replicates })
}
