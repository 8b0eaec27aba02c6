use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Law of the spot variable Z'. The parameters are densities with respect to
/// the control measure, so a cell of measure m carries the law with every
/// Lévy parameter scaled by m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpotLaw {
    Gaussian { drift: f64, variance: f64 },
    Poisson,
    /// Γ(shape β, rate α).
    Gamma { shape: f64, rate: f64 },
    /// IG(η, γ) with mean η/γ and variance η/γ³.
    InverseGaussian { eta: f64, gamma: f64 },
}

impl SpotLaw {
    pub fn name(&self) -> &'static str {
        match self {
            SpotLaw::Gaussian { .. } => "Gaussian",
            SpotLaw::Poisson => "Poisson",
            SpotLaw::Gamma { .. } => "Gamma",
            SpotLaw::InverseGaussian { .. } => "inverse Gaussian",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpotLaw::Gaussian { drift, variance } => drift.is_finite() && variance.is_finite() && variance >= 0.0,
            SpotLaw::Poisson => true,
            SpotLaw::Gamma { shape, rate } => shape.is_finite() && rate.is_finite() && shape > 0.0 && rate > 0.0,
            SpotLaw::InverseGaussian { eta, gamma } => {
                eta.is_finite() && gamma.is_finite() && eta > 0.0 && gamma > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("{} spot law has out-of-range parameters: {self:?}", self.name())))
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, SpotLaw::Gaussian { .. })
    }

    pub fn is_poisson(&self) -> bool {
        matches!(self, SpotLaw::Poisson)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            SpotLaw::Gaussian { drift, .. } => drift,
            SpotLaw::Poisson => 1.0,
            SpotLaw::Gamma { shape, rate } => shape / rate,
            SpotLaw::InverseGaussian { eta, gamma } => eta / gamma,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            SpotLaw::Gaussian { variance, .. } => variance,
            SpotLaw::Poisson => 1.0,
            SpotLaw::Gamma { shape, rate } => shape / (rate * rate),
            SpotLaw::InverseGaussian { eta, gamma } => eta / (gamma * gamma * gamma),
        }
    }

    /// log E exp(iλZ').
    pub fn cumulant(&self, lambda: f64) -> Complex64 {
        let il = Complex64::new(0.0, lambda);
        match *self {
            SpotLaw::Gaussian { drift, variance } => il * drift - 0.5 * lambda * lambda * variance,
            SpotLaw::Poisson => il.exp() - 1.0,
            SpotLaw::Gamma { shape, rate } => -shape * (1.0 - il / rate).ln(),
            SpotLaw::InverseGaussian { eta, gamma } => {
                eta * gamma * (1.0 - (1.0 - 2.0 * il / (gamma * gamma)).sqrt())
            }
        }
    }

    /// Supremum of the arguments at which the kumulant is finite (exclusive).
    pub fn kumulant_sup(&self) -> f64 {
        match *self {
            SpotLaw::Gaussian { .. } | SpotLaw::Poisson => f64::INFINITY,
            SpotLaw::Gamma { rate, .. } => rate,
            SpotLaw::InverseGaussian { gamma, .. } => 0.5 * gamma * gamma,
        }
    }

    /// log E exp(θZ').
    pub fn kumulant(&self, theta: f64) -> Result<f64> {
        if !(theta < self.kumulant_sup()) || theta.is_nan() {
            return Err(Error::KumulantDomain { law: self.name(), theta });
        }
        Ok(match *self {
            SpotLaw::Gaussian { drift, variance } => theta * drift + 0.5 * theta * theta * variance,
            SpotLaw::Poisson => theta.exp_m1(),
            SpotLaw::Gamma { shape, rate } => -shape * (-theta / rate).ln_1p(),
            SpotLaw::InverseGaussian { eta, gamma } => {
                let u = -2.0 * theta / (gamma * gamma);
                // 1 - sqrt(1+u) = -u / (1 + sqrt(1+u)), stable for small u.
                eta * gamma * (-u / (1.0 + (1.0 + u).sqrt()))
            }
        })
    }

    /// Sampler for Z(A) with μ(A) = m.
    pub fn cell_sampler(&self, m: f64) -> CellSampler {
        if !(m > 0.0) {
            return CellSampler::Zero;
        }
        match *self {
            SpotLaw::Gaussian { drift, variance } => {
                CellSampler::Normal(Normal::new(drift * m, (variance * m).sqrt()).expect("validated"))
            }
            SpotLaw::Poisson => CellSampler::Poisson(Poisson::new(m).expect("positive mean")),
            SpotLaw::Gamma { shape, rate } => {
                CellSampler::Gamma(Gamma::new(shape * m, 1.0 / rate).expect("validated"))
            }
            SpotLaw::InverseGaussian { eta, gamma } => {
                let delta = eta * m;
                CellSampler::InverseGaussian(InverseGaussian::new(delta / gamma, delta * delta))
            }
        }
    }
}

pub enum CellSampler {
    Zero,
    Normal(Normal<f64>),
    Poisson(Poisson<f64>),
    Gamma(Gamma<f64>),
    InverseGaussian(InverseGaussian),
}

impl CellSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            CellSampler::Zero => 0.0,
            CellSampler::Normal(d) => d.sample(rng),
            CellSampler::Poisson(d) => d.sample(rng),
            CellSampler::Gamma(d) => d.sample(rng),
            CellSampler::InverseGaussian(d) => d.sample(rng),
        }
    }
}

/// Inverse Gaussian in (mean, shape) form, sampled by the transformation
/// with one chi-square draw and one uniform. The smaller root is computed
/// without cancellation, which matters when the shape is tiny.
#[derive(Clone, Copy, Debug)]
pub struct InverseGaussian {
    mean: f64,
    shape: f64,
}

impl InverseGaussian {
    pub fn new(mean: f64, shape: f64) -> Self {
        debug_assert!(mean > 0.0 && shape > 0.0);
        InverseGaussian { mean, shape }
    }
}

impl Distribution<f64> for InverseGaussian {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = self.mean;
        let n: f64 = rng.sample(StandardNormal);
        let y = n * n;
        if y == 0.0 {
            return m;
        }
        let my = m * y;
        let root = (my * my + 4.0 * m * self.shape * y).sqrt();
        let x1 = 4.0 * m * m * self.shape * y / ((my + root) * (my + root));
        if x1 <= 0.0 {
            return m * m / f64::MIN_POSITIVE;
        }
        let u: f64 = rng.random();
        if u * (m + x1) <= m {
            x1
        } else {
            m * m / x1
        }
    }
}
