use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A scalar function of time: lag lengths T(t), half-widths Θ(s), tumour
/// band lengths t0(t) and similar per-time parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Schedule {
    Constant { value: f64 },
    Linear { slope: f64, intercept: f64 },
    /// `values[i]` holds on `[knots[i], knots[i+1])`; before the first knot
    /// the first value is used.
    Steps { knots: Vec<f64>, values: Vec<f64> },
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn linear(slope: f64, intercept: f64) -> Self {
        Schedule::Linear { slope, intercept }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Linear { slope, intercept } => slope * x + intercept,
            Schedule::Steps { knots, values } => {
                let i = knots.partition_point(|&k| k <= x);
                values[i.saturating_sub(1)]
            }
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        match self {
            Schedule::Constant { value } if !value.is_finite() => {
                Err(invalid(format!("{name}: value must be finite")))
            }
            Schedule::Linear { slope, intercept } if !(slope.is_finite() && intercept.is_finite()) => {
                Err(invalid(format!("{name}: coefficients must be finite")))
            }
            Schedule::Steps { knots, values } => {
                if knots.is_empty() || knots.len() != values.len() {
                    return Err(invalid(format!("{name}: knots and values must be non-empty and of equal length")));
                }
                if knots.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid(format!("{name}: knots must be strictly increasing")));
                }
                if knots.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(invalid(format!("{name}: entries must be finite")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Points where the schedule may jump.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            Schedule::Steps { knots, .. } => knots,
            _ => &[],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Schedule::Constant { .. })
    }

    /// Lower bound of the schedule on [lo, hi], exact for every variant.
    pub fn min_on(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Linear { .. } => self.eval(lo).min(self.eval(hi)),
            Schedule::Steps { knots, values } => {
                let mut m = self.eval(lo);
                for (k, v) in knots.iter().zip(values) {
                    if *k > lo && *k <= hi {
                        m = m.min(*v);
                    }
                }
                m
            }
        }
    }

    pub fn max_on(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Linear { .. } => self.eval(lo).max(self.eval(hi)),
            Schedule::Steps { knots, values } => {
                let mut m = self.eval(lo);
                for (k, v) in knots.iter().zip(values) {
                    if *k > lo && *k <= hi {
                        m = m.max(*v);
                    }
                }
                m
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_lookup() {
        let s = Schedule::Steps { knots: vec![21.0, 25.0, 55.0], values: vec![1.0, 2.0, 3.0] };
        s.validate("s").unwrap();
        assert_eq!(s.eval(0.0), 1.0);
        assert_eq!(s.eval(21.0), 1.0);
        assert_eq!(s.eval(24.9), 1.0);
        assert_eq!(s.eval(25.0), 2.0);
        assert_eq!(s.eval(100.0), 3.0);
        assert_eq!(s.min_on(22.0, 60.0), 1.0);
        assert_eq!(s.max_on(22.0, 30.0), 2.0);
    }

    #[test]
    fn rejects_bad_steps() {
        let s = Schedule::Steps { knots: vec![2.0, 1.0], values: vec![1.0, 2.0] };
        assert!(s.validate("s").is_err());
    }

    #[test]
    fn toml_shape() {
        let s: Schedule = serde_json::from_str(r#"{"kind":"linear","slope":0.2,"intercept":0.0}"#).unwrap();
        assert_eq!(s.eval(20.0), 4.0);
        assert!(serde_json::from_str::<Schedule>(r#"{"kind":"constant","value":1,"x":2}"#).is_err());
    }
}
