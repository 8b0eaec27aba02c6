//! Ambit sets A_t(φ) on the cylinder and their measures.
//!
//! Every supported family is described by a time window [lo(t), t] and an
//! angular half-width w_t(s): A_t(φ) = {(θ, s) : lo ≤ s ≤ t, d(θ, φ) ≤ w_t(s)}.

mod induced;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use induced::{union_lower_edge, InducedWeight};

use crate::error::{invalid, Result};
use crate::levy::ControlMeasure;
use crate::quadrature::{integrate_with_breaks, Tolerance};
use crate::schedule::Schedule;

const TWO_PI: f64 = 2.0 * PI;

/// Map an angle into [−π, π). Idempotent.
#[inline]
pub fn wrap(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let mut r = (x + PI).rem_euclid(TWO_PI) - PI;
    if r >= PI {
        r -= TWO_PI;
    }
    r
}

/// Cyclic distance on the circle, in [0, π].
#[inline]
pub fn cyc_dist(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AmbitFamily {
    /// The whole circle over [t − T(t), t].
    FullAngle { lag: Schedule },
    /// Half-width Θ(s) over [t − T(t), t].
    Rectangular { half_width: Schedule, lag: Schedule },
    /// Half-width Θ/s over [max(0, t − T), t].
    WedgeOverS { theta: f64, lag: f64 },
    /// Below the curve h_t(θ) = t + Σ_k c_k (cos kθ − 1), k = 1, 2, ...
    BoundaryFn { coefficients: Vec<f64> },
    /// Full circle on [t − T, t − t0], then a triangle narrowing linearly
    /// from φ0/2 to 0 over the newest band [t − t0, t].
    Tumour { lag: Schedule, band: Schedule, phi0: Schedule },
}

impl AmbitFamily {
    pub fn validate(&self) -> Result<()> {
        let nonneg = |s: &Schedule, name: &str| -> Result<()> {
            s.validate(name)?;
            let ok = match s {
                Schedule::Constant { value } => *value >= 0.0,
                Schedule::Linear { slope, intercept } => *slope >= 0.0 && *intercept >= 0.0,
                Schedule::Steps { values, .. } => values.iter().all(|v| *v >= 0.0),
            };
            if ok {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be non-negative")))
            }
        };
        match self {
            AmbitFamily::FullAngle { lag } => nonneg(lag, "lag"),
            AmbitFamily::Rectangular { half_width, lag } => {
                nonneg(half_width, "half_width")?;
                nonneg(lag, "lag")
            }
            AmbitFamily::WedgeOverS { theta, lag } => {
                if theta.is_finite() && *theta >= 0.0 && lag.is_finite() && *lag >= 0.0 {
                    Ok(())
                } else {
                    Err(invalid("wedge needs theta >= 0 and lag >= 0"))
                }
            }
            AmbitFamily::BoundaryFn { coefficients } => {
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(invalid("boundary coefficients must be finite"));
                }
                let n = 4096;
                let mut prev = boundary_height(coefficients, 0.0, 0.0);
                for i in 1..=n {
                    let h = boundary_height(coefficients, 0.0, PI * i as f64 / n as f64);
                    if h > prev + 1e-12 {
                        return Err(invalid("boundary curve must be non-increasing on [0, π]"));
                    }
                    prev = h;
                }
                Ok(())
            }
            AmbitFamily::Tumour { lag, band, phi0 } => {
                nonneg(lag, "lag")?;
                nonneg(band, "band")?;
                nonneg(phi0, "phi0")
            }
        }
    }

    /// Time window [lo, t] of A_t.
    pub fn window(&self, t: f64) -> (f64, f64) {
        match self {
            AmbitFamily::FullAngle { lag } | AmbitFamily::Rectangular { lag, .. } | AmbitFamily::Tumour { lag, .. } => {
                (t - lag.eval(t), t)
            }
            AmbitFamily::WedgeOverS { lag, .. } => ((t - lag).max(0.0), t),
            AmbitFamily::BoundaryFn { coefficients } => (boundary_height(coefficients, t, PI), t),
        }
    }

    /// w_t(s) in [0, π], or None when s lies outside the window.
    pub fn halfwidth(&self, t: f64, s: f64) -> Option<f64> {
        let (lo, hi) = self.window(t);
        if !(s >= lo && s <= hi) {
            return None;
        }
        Some(match self {
            AmbitFamily::FullAngle { .. } => PI,
            AmbitFamily::Rectangular { half_width, .. } => half_width.eval(s).min(PI),
            AmbitFamily::WedgeOverS { theta, .. } => wedge_width(*theta, s),
            AmbitFamily::BoundaryFn { coefficients } => boundary_width(coefficients, t, s),
            AmbitFamily::Tumour { band, phi0, .. } => {
                let t0 = band.eval(t);
                if s <= t - t0 {
                    PI
                } else {
                    let u = s - t + t0;
                    let p = phi0.eval(t);
                    (0.5 * p - 0.5 * p / t0 * u).clamp(0.0, PI)
                }
            }
        })
    }

    #[inline]
    pub fn contains(&self, t: f64, phi: f64, theta: f64, s: f64) -> bool {
        self.halfwidth(t, s).is_some_and(|w| cyc_dist(theta, phi) <= w)
    }

    /// Upper bound of w_t on [lo, hi].
    pub fn max_halfwidth_on(&self, t: f64, lo: f64, hi: f64) -> f64 {
        let (wlo, whi) = self.window(t);
        let (lo, hi) = (lo.max(wlo), hi.min(whi));
        if hi < lo {
            return 0.0;
        }
        match self {
            AmbitFamily::FullAngle { .. } => PI,
            AmbitFamily::Rectangular { half_width, .. } => half_width.max_on(lo, hi).min(PI),
            AmbitFamily::WedgeOverS { theta, .. } => wedge_width(*theta, lo),
            AmbitFamily::BoundaryFn { coefficients } => boundary_width(coefficients, t, lo),
            AmbitFamily::Tumour { .. } => self.halfwidth(t, lo).unwrap_or(PI),
        }
    }

    /// Times in the window where w_t(s) has a kink or jump.
    pub fn breakpoints(&self, t: f64) -> Vec<f64> {
        let (lo, hi) = self.window(t);
        let mut v = vec![lo, hi];
        match self {
            AmbitFamily::Rectangular { half_width, .. } => v.extend_from_slice(half_width.breakpoints()),
            AmbitFamily::WedgeOverS { theta, .. } => v.push(theta / PI),
            AmbitFamily::Tumour { band, .. } => v.push(t - band.eval(t)),
            _ => {}
        }
        v
    }

    /// True when A_t(φ) = C_φ × B_t, i.e. the angular extent at a point
    /// depends only on the point's own time.
    pub fn factorizes(&self) -> bool {
        matches!(
            self,
            AmbitFamily::FullAngle { .. } | AmbitFamily::Rectangular { .. } | AmbitFamily::WedgeOverS { .. }
        )
    }

    /// Angular half-width at point time s for factorizing families.
    pub fn point_halfwidth(&self, s: f64) -> Option<f64> {
        match self {
            AmbitFamily::FullAngle { .. } => Some(PI),
            AmbitFamily::Rectangular { half_width, .. } => Some(half_width.eval(s).min(PI)),
            AmbitFamily::WedgeOverS { theta, .. } => Some(wedge_width(*theta, s)),
            _ => None,
        }
    }

    /// μ(A_{t1}(φ1) ∩ A_{t2}(φ2)).
    pub fn intersection_measure(&self, t1: f64, phi1: f64, t2: f64, phi2: f64, control: &ControlMeasure) -> f64 {
        let (lo1, hi1) = self.window(t1);
        let (lo2, hi2) = self.window(t2);
        let (lo, hi) = (lo1.max(lo2), hi1.min(hi2));
        if !(hi > lo) {
            return 0.0;
        }
        if let AmbitFamily::FullAngle { .. } = self {
            return TWO_PI * control.mass(lo, hi);
        }
        let d = cyc_dist(phi1, phi2);
        let mut breaks = self.breakpoints(t1);
        breaks.extend(self.breakpoints(t2));
        breaks.extend(control.breakpoints());
        if let AmbitFamily::WedgeOverS { theta, .. } = self {
            if d > 0.0 {
                breaks.push(2.0 * theta / d);
            }
            breaks.push(2.0 * theta / (TWO_PI - d));
        }
        if let AmbitFamily::Rectangular { half_width, .. } = self {
            if half_width.is_constant() {
                let w = half_width.eval(lo);
                return arc_overlap(d, w, w) * control.mass(lo, hi);
            }
        }
        let f = |s: f64| {
            let w1 = self.halfwidth(t1, s).unwrap_or(0.0);
            let w2 = self.halfwidth(t2, s).unwrap_or(0.0);
            control.density(s) * arc_overlap(d, w1, w2)
        };
        integrate_with_breaks(f, lo, hi, &breaks, Tolerance::new(1e-15, 1e-12))
    }

    pub fn measure(&self, t: f64, control: &ControlMeasure) -> f64 {
        self.intersection_measure(t, 0.0, t, 0.0, control)
    }
}

#[inline]
fn wedge_width(theta: f64, s: f64) -> f64 {
    if s * PI <= theta {
        PI
    } else {
        theta / s
    }
}

/// h_t(θ) = t + Σ_k c_k (cos kθ − 1).
pub fn boundary_height(coefficients: &[f64], t: f64, theta: f64) -> f64 {
    t + coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| c * (((i + 1) as f64 * theta).cos() - 1.0))
        .sum::<f64>()
}

/// sup{θ ∈ [0, π] : h_t(θ) ≥ s} for a non-increasing h_t.
pub fn boundary_width(coefficients: &[f64], t: f64, s: f64) -> f64 {
    if boundary_height(coefficients, t, PI) >= s {
        return PI;
    }
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if boundary_height(coefficients, t, mid) >= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Length of [−w1, w1] ∩ [d − w2, d + w2] on the circle, d ∈ [0, π].
pub fn arc_overlap(d: f64, w1: f64, w2: f64) -> f64 {
    let (w1, w2) = (w1.clamp(0.0, PI), w2.clamp(0.0, PI));
    if w1 >= PI {
        return 2.0 * w2;
    }
    if w2 >= PI {
        return 2.0 * w1;
    }
    let mut total = 0.0;
    for k in [-1.0, 0.0, 1.0] {
        let c = d + k * TWO_PI;
        let lo = (-w1).max(c - w2);
        let hi = w1.min(c + w2);
        if hi > lo {
            total += hi - lo;
        }
    }
    total
}

/// Overlap of the windows [t1 − T1, t1] and [t2 − T2, t2].
pub fn time_overlap(t1: f64, lag1: f64, t2: f64, lag2: f64) -> Option<(f64, f64)> {
    let lo = (t1 - lag1).max(t2 - lag2);
    let hi = t1.min(t2);
    (hi > lo).then_some((lo, hi))
}

/// μ(A_t(0) ∩ A_t(φ)) for a set below a symmetric non-increasing boundary,
/// given h̄(θ) = ∫_0^{h_t(θ)} g: 2∫_{−π}^{−π+φ/2} h̄ + 2∫_{φ/2}^{π} h̄ − 2π h̄(π).
pub fn mu_self_intersection_direct<F: Fn(f64) -> f64>(hbar: F, phi: f64) -> f64 {
    let p = if phi.abs() >= PI { PI } else { cyc_dist(phi, 0.0) };
    let tol = Tolerance::new(1e-15, 1e-13);
    let a = crate::quadrature::integrate(&hbar, -PI, -PI + 0.5 * p, tol);
    let b = crate::quadrature::integrate(&hbar, 0.5 * p, PI, tol);
    2.0 * a + 2.0 * b - TWO_PI * hbar(PI)
}

/// h̄(θ) = ∫_0^{h_t(θ)} g for the boundary family.
pub fn boundary_hbar<'a>(coefficients: &'a [f64], t: f64, control: &'a ControlMeasure) -> impl Fn(f64) -> f64 + 'a {
    move |theta| control.antiderivative(boundary_height(coefficients, t, theta)) - control.antiderivative(0.0)
}

/// (θ, s) ↦ (s cos θ, s sin θ).
pub fn euclidean_embedding(theta: f64, s: f64) -> (f64, f64) {
    (s * theta.cos(), s * theta.sin())
}

/// Inverse of the embedding for s > 0.
pub fn embedding_preimage(x: f64, y: f64) -> (f64, f64) {
    (wrap(y.atan2(x)), x.hypot(y))
}

/// Whether an embedded point lies in the image of A_t(φ).
pub fn embedded_contains(family: &AmbitFamily, t: f64, phi: f64, x: f64, y: f64) -> bool {
    let (theta, s) = embedding_preimage(x, y);
    family.contains(t, phi, theta, s)
}
