//! Deterministic kernels f_t(ξ; φ) integrated against the basis.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::schedule::Schedule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightFunction {
    Constant { value: f64 },
    Fourier { coefficients: FourierWeight },
    /// α(t) cos(φ − θ) on the older band and β(t) on the newest band of
    /// length `band`.
    Tumour { alpha: Schedule, beta: Schedule, band: Schedule },
}

/// Weight Σ_k a_k(t, s) cos(k(θ − φ)), with k starting at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FourierWeight {
    /// a_k constant.
    Constant { a: Vec<f64> },
    /// a_k(t, s) = b(t) c_k.
    Separable { time: Schedule, c: Vec<f64> },
    /// a_k(t, s) = b_k(t − s).
    Stationary { kernels: Vec<LagKernel> },
    /// a_k^t, piecewise constant in t: row i holds on [times[i], times[i+1]).
    Tabulated { times: Vec<f64>, rows: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LagKernel {
    Exponential { amplitude: f64, rate: f64 },
    Steps { knots: Vec<f64>, values: Vec<f64> },
}

impl LagKernel {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            LagKernel::Exponential { amplitude, rate } => amplitude * (-rate * u).exp(),
            LagKernel::Steps { knots, values } => {
                let i = knots.partition_point(|&k| k <= u);
                values[i.saturating_sub(1)]
            }
        }
    }
}

/// Σ_{k<n} a_k cos(kx) by the three-term recurrence.
#[inline]
pub fn cosine_sum(n: usize, mut a: impl FnMut(usize) -> f64, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let c1 = x.cos();
    let mut prev = 1.0;
    let mut cur = c1;
    let mut total = a(0);
    for k in 1..n {
        total += a(k) * cur;
        let next = 2.0 * c1 * cur - prev;
        prev = cur;
        cur = next;
    }
    total
}

impl FourierWeight {
    pub fn n_orders(&self) -> usize {
        match self {
            FourierWeight::Constant { a } => a.len(),
            FourierWeight::Separable { c, .. } => c.len(),
            FourierWeight::Stationary { kernels } => kernels.len(),
            FourierWeight::Tabulated { rows, .. } => rows.iter().map(Vec::len).max().unwrap_or(0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            FourierWeight::Constant { a } if !finite(a) => Err(invalid("Fourier coefficients must be finite")),
            FourierWeight::Separable { time, c } => {
                time.validate("time factor")?;
                if finite(c) {
                    Ok(())
                } else {
                    Err(invalid("Fourier coefficients must be finite"))
                }
            }
            FourierWeight::Tabulated { times, rows } => {
                if times.is_empty() || times.len() != rows.len() || times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("tabulated coefficients need strictly increasing times, one row each"));
                }
                if rows.iter().all(|r| finite(r)) {
                    Ok(())
                } else {
                    Err(invalid("Fourier coefficients must be finite"))
                }
            }
            FourierWeight::Stationary { kernels } => {
                for k in kernels {
                    if let LagKernel::Steps { knots, values } = k {
                        if knots.is_empty() || knots.len() != values.len() || knots.windows(2).any(|w| !(w[1] > w[0])) {
                            return Err(invalid("lag kernel steps need strictly increasing knots"));
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn coefficient(&self, k: usize, t: f64, s: f64) -> f64 {
        match self {
            FourierWeight::Constant { a } => a.get(k).copied().unwrap_or(0.0),
            FourierWeight::Separable { time, c } => time.eval(t) * c.get(k).copied().unwrap_or(0.0),
            FourierWeight::Stationary { kernels } => kernels.get(k).map_or(0.0, |b| b.eval(t - s)),
            FourierWeight::Tabulated { times, rows } => {
                let i = times.partition_point(|&x| x <= t).saturating_sub(1);
                rows[i].get(k).copied().unwrap_or(0.0)
            }
        }
    }

    pub fn eval(&self, t: f64, delta: f64, s: f64) -> f64 {
        match self {
            FourierWeight::Constant { a } => cosine_sum(a.len(), |k| a[k], delta),
            FourierWeight::Separable { time, c } => time.eval(t) * cosine_sum(c.len(), |k| c[k], delta),
            FourierWeight::Tabulated { times, rows } => {
                let i = times.partition_point(|&x| x <= t).saturating_sub(1);
                let row = &rows[i];
                cosine_sum(row.len(), |k| row[k], delta)
            }
            FourierWeight::Stationary { kernels } => cosine_sum(kernels.len(), |k| kernels[k].eval(t - s), delta),
        }
    }

    fn depends_on_outer_time(&self) -> bool {
        !matches!(self, FourierWeight::Constant { .. })
    }

    /// Point times s at which a_k(t, ·) may jump, for fixed t.
    pub fn s_breaks(&self, t: f64) -> Vec<f64> {
        match self {
            FourierWeight::Stationary { kernels } => kernels
                .iter()
                .flat_map(|k| match k {
                    LagKernel::Steps { knots, .. } => knots.iter().map(|u| t - u).collect::<Vec<_>>(),
                    _ => Vec::new(),
                })
                .collect(),
            _ => Vec::new(),
        }
    }
}

impl WeightFunction {
    pub fn constant(value: f64) -> Self {
        WeightFunction::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFunction::Constant { value } if !value.is_finite() => Err(invalid("weight must be finite")),
            WeightFunction::Fourier { coefficients } => coefficients.validate(),
            WeightFunction::Tumour { alpha, beta, band } => {
                alpha.validate("alpha")?;
                beta.validate("beta")?;
                band.validate("band")
            }
            _ => Ok(()),
        }
    }

    /// f_t(θ, s; φ), assuming (θ, s) lies in the ambit set.
    #[inline]
    pub fn eval(&self, t: f64, theta: f64, s: f64, phi: f64) -> f64 {
        match self {
            WeightFunction::Constant { value } => *value,
            WeightFunction::Fourier { coefficients } => coefficients.eval(t, theta - phi, s),
            WeightFunction::Tumour { alpha, beta, band } => {
                if s <= t - band.eval(t) {
                    alpha.eval(t) * (phi - theta).cos()
                } else {
                    beta.eval(t)
                }
            }
        }
    }

    pub fn is_angle_free(&self) -> bool {
        match self {
            WeightFunction::Constant { .. } => true,
            WeightFunction::Fourier { coefficients } => coefficients.n_orders() <= 1,
            WeightFunction::Tumour { .. } => false,
        }
    }

    pub fn depends_on_outer_time(&self) -> bool {
        match self {
            WeightFunction::Constant { .. } => false,
            WeightFunction::Fourier { coefficients } => coefficients.depends_on_outer_time(),
            WeightFunction::Tumour { .. } => true,
        }
    }

    /// Point times where f_t(·, s; φ) may jump, for fixed t.
    pub fn s_breaks(&self, t: f64) -> Vec<f64> {
        match self {
            WeightFunction::Constant { .. } => Vec::new(),
            WeightFunction::Fourier { coefficients } => coefficients.s_breaks(t),
            WeightFunction::Tumour { band, .. } => vec![t - band.eval(t)],
        }
    }

    /// Outer times t where f_t(ξ; φ) may jump, for a fixed point time s.
    pub fn t_breaks(&self, s: f64) -> Vec<f64> {
        match self {
            WeightFunction::Constant { .. } => Vec::new(),
            WeightFunction::Fourier { coefficients } => match coefficients {
                FourierWeight::Separable { time, .. } => time.breakpoints().to_vec(),
                FourierWeight::Tabulated { times, .. } => times.clone(),
                FourierWeight::Stationary { kernels } => kernels
                    .iter()
                    .flat_map(|k| match k {
                        LagKernel::Steps { knots, .. } => knots.iter().map(|u| s + u).collect::<Vec<_>>(),
                        _ => Vec::new(),
                    })
                    .collect(),
                FourierWeight::Constant { .. } => Vec::new(),
            },
            WeightFunction::Tumour { alpha, beta, band } => {
                let mut v: Vec<f64> = alpha.breakpoints().iter().chain(beta.breakpoints()).copied().collect();
                match band {
                    Schedule::Constant { value } => v.push(s + value),
                    Schedule::Steps { values, knots } => {
                        v.extend(values.iter().map(|b| s + b));
                        v.extend(knots.iter().copied());
                    }
                    Schedule::Linear { slope, intercept } if *slope != 1.0 => {
                        v.push((s + intercept) / (1.0 - slope));
                    }
                    _ => {}
                }
                v
            }
        }
    }
}
