use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Density g of the control measure μ(dθ ds) = g(s) ds dθ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ControlMeasure {
    Constant { c: f64 },
    /// a·s on s ≥ 0, zero before.
    Linear { a: f64 },
    Exponential { a: f64, b: f64 },
    /// a·s^alpha on s ≥ 0, zero before.
    Power { a: f64, alpha: f64 },
    /// `values[i]` on `[knots[i], knots[i+1])`, the last value continues
    /// forever, zero before the first knot.
    Steps { knots: Vec<f64>, values: Vec<f64> },
}

impl Default for ControlMeasure {
    fn default() -> Self {
        ControlMeasure::lebesgue()
    }
}

impl ControlMeasure {
    pub fn lebesgue() -> Self {
        ControlMeasure::Constant { c: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ControlMeasure::Constant { c } => c.is_finite() && *c >= 0.0,
            ControlMeasure::Linear { a } => a.is_finite() && *a >= 0.0,
            ControlMeasure::Exponential { a, b } => a.is_finite() && b.is_finite() && *a >= 0.0,
            ControlMeasure::Power { a, alpha } => {
                a.is_finite() && alpha.is_finite() && *a >= 0.0 && *alpha >= 0.0
            }
            ControlMeasure::Steps { knots, values } => {
                !knots.is_empty()
                    && knots.len() == values.len()
                    && knots.windows(2).all(|w| w[1] > w[0])
                    && knots.iter().all(|k| k.is_finite())
                    && values.iter().all(|v| v.is_finite() && *v >= 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("control measure has out-of-range parameters: {self:?}")))
        }
    }

    pub fn density(&self, s: f64) -> f64 {
        match self {
            ControlMeasure::Constant { c } => *c,
            ControlMeasure::Linear { a } => {
                if s >= 0.0 {
                    a * s
                } else {
                    0.0
                }
            }
            ControlMeasure::Exponential { a, b } => a * (-b * s).exp(),
            ControlMeasure::Power { a, alpha } => {
                if s < 0.0 {
                    0.0
                } else if *alpha == 0.0 {
                    *a
                } else {
                    a * s.powf(*alpha)
                }
            }
            ControlMeasure::Steps { knots, values } => {
                let i = knots.partition_point(|&k| k <= s);
                if i == 0 {
                    0.0
                } else {
                    values[i - 1]
                }
            }
        }
    }

    /// ∫_0^s g, extended to negative s with the same sign convention.
    pub fn antiderivative(&self, s: f64) -> f64 {
        match self {
            ControlMeasure::Constant { c } => c * s,
            ControlMeasure::Linear { a } => 0.5 * a * s.max(0.0).powi(2),
            ControlMeasure::Exponential { a, b } => {
                if *b == 0.0 {
                    a * s
                } else {
                    -a * (-b * s).exp_m1() / b
                }
            }
            ControlMeasure::Power { a, alpha } => a * s.max(0.0).powf(alpha + 1.0) / (alpha + 1.0),
            ControlMeasure::Steps { knots, values } => {
                let acc = |x: f64| {
                    let mut total = 0.0;
                    for i in 0..knots.len() {
                        let lo = knots[i];
                        if x <= lo {
                            break;
                        }
                        let hi = knots.get(i + 1).copied().unwrap_or(f64::INFINITY).min(x);
                        total += values[i] * (hi - lo);
                    }
                    total
                };
                acc(s) - acc(0.0)
            }
        }
    }

    /// ∫_lo^hi g(s) ds.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        match self {
            ControlMeasure::Constant { c } => c * (hi - lo),
            ControlMeasure::Exponential { a, b } if *b != 0.0 => {
                a * ((-b * lo).exp() - (-b * hi).exp()) / b
            }
            _ => self.antiderivative(hi) - self.antiderivative(lo),
        }
    }

    /// Upper bound of g on [lo, hi], used for rejection sampling.
    pub fn max_on(&self, lo: f64, hi: f64) -> f64 {
        match self {
            ControlMeasure::Constant { c } => *c,
            ControlMeasure::Linear { .. } | ControlMeasure::Power { .. } => self.density(hi),
            ControlMeasure::Exponential { .. } => self.density(lo).max(self.density(hi)),
            ControlMeasure::Steps { knots, values } => {
                let mut m = self.density(lo);
                for (k, v) in knots.iter().zip(values) {
                    if *k > lo && *k < hi {
                        m = m.max(*v);
                    }
                }
                m
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            ControlMeasure::Linear { .. } | ControlMeasure::Power { .. } => vec![0.0],
            ControlMeasure::Steps { knots, .. } => knots.clone(),
            _ => Vec::new(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, ControlMeasure::Constant { .. })
    }

    /// The density multiplied by `v`.
    pub fn scaled(&self, v: f64) -> ControlMeasure {
        match self {
            ControlMeasure::Constant { c } => ControlMeasure::Constant { c: c * v },
            ControlMeasure::Linear { a } => ControlMeasure::Linear { a: a * v },
            ControlMeasure::Exponential { a, b } => ControlMeasure::Exponential { a: a * v, b: *b },
            ControlMeasure::Power { a, alpha } => ControlMeasure::Power { a: a * v, alpha: *alpha },
            ControlMeasure::Steps { knots, values } => ControlMeasure::Steps {
                knots: knots.clone(),
                values: values.iter().map(|x| x * v).collect(),
            },
        }
    }
}
