//! The time-union Ā_t(φ) = ∪_{s ≤ t} A_s(φ) and the induced weight
//! f̄_t(ξ; φ) = ∫ 1{ξ ∈ A_s(φ)} f_s(ξ; φ) ds of rate-linear growth.

use std::f64::consts::PI;

use super::{cyc_dist, AmbitFamily};
use crate::discretize::WeightField;
use crate::quadrature::{integrate_with_breaks, Tolerance};
use crate::schedule::Schedule;
use crate::weight::WeightFunction;

const SCAN_STEPS: usize = 512;

/// Lower time edge of Ā_t, clipped at 0: points before time 0 never enter.
pub fn union_lower_edge(family: &AmbitFamily, t: f64) -> f64 {
    let mut candidates = vec![0.0, t];
    let knots: &[f64] = match family {
        AmbitFamily::FullAngle { lag } | AmbitFamily::Rectangular { lag, .. } | AmbitFamily::Tumour { lag, .. } => {
            lag.breakpoints()
        }
        _ => &[],
    };
    candidates.extend(knots.iter().copied().filter(|k| *k > 0.0 && *k < t));
    candidates
        .into_iter()
        .map(|s| family.window(s).0)
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// Sub-intervals of [lo, hi] where `pred` holds, located by a uniform scan
/// refined with bisection at each change of state.
fn scan_intervals(lo: f64, hi: f64, pred: impl Fn(f64) -> bool) -> Vec<(f64, f64)> {
    if !(hi > lo) {
        return Vec::new();
    }
    let refine = |mut a: f64, mut b: f64, a_in: bool| {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if pred(m) == a_in {
                a = m;
            } else {
                b = m;
            }
        }
        if a_in {
            a
        } else {
            b
        }
    };
    let mut out = Vec::new();
    let step = (hi - lo) / SCAN_STEPS as f64;
    let mut prev_s = lo;
    let mut prev_in = pred(lo);
    let mut start = prev_in.then_some(lo);
    for i in 1..=SCAN_STEPS {
        let s = if i == SCAN_STEPS { hi } else { lo + step * i as f64 };
        let now = pred(s);
        if now != prev_in {
            let edge = refine(prev_s, s, prev_in);
            if now {
                start = Some(edge);
            } else if let Some(a) = start.take() {
                out.push((a, edge));
            }
        }
        prev_s = s;
        prev_in = now;
    }
    if let Some(a) = start {
        out.push((a, hi));
    }
    out.retain(|(a, b)| b > a);
    out
}

/// Largest outer time s ∈ [sp, t] with s − T(s) ≤ sp, in closed form where
/// the lag allows it.
fn lag_window(lag: &Schedule, sp: f64, t: f64) -> Vec<(f64, f64)> {
    let end = match lag {
        Schedule::Constant { value } => Some((sp + value).min(t)),
        Schedule::Linear { slope, intercept } if *slope < 1.0 => Some(((sp + intercept) / (1.0 - slope)).min(t)),
        Schedule::Linear { .. } => Some(t),
        Schedule::Steps { .. } => None,
    };
    match end {
        Some(e) if e > sp => vec![(sp, e)],
        Some(_) => Vec::new(),
        None => scan_intervals(sp, t, |s| s - lag.eval(s) <= sp),
    }
}

#[derive(Clone, Debug)]
pub struct InducedWeight {
    pub family: AmbitFamily,
    pub weight: WeightFunction,
    pub t: f64,
    pub phi: f64,
    /// Use the closed-form C_φ × B route when the family factorizes.
    pub factorized: bool,
    lower: f64,
}

impl InducedWeight {
    pub fn new(family: AmbitFamily, weight: WeightFunction, t: f64, phi: f64) -> Self {
        let factorized = family.factorizes();
        let lower = union_lower_edge(&family, t);
        InducedWeight { family, weight, t, phi, factorized, lower }
    }

    /// Force the generic membership scan even for factorizing families.
    pub fn generic(mut self) -> Self {
        self.factorized = false;
        self
    }

    /// Outer times s ∈ [s', t] with (θ, s') ∈ A_s(φ).
    pub fn outer_times(&self, theta: f64, sp: f64) -> Vec<(f64, f64)> {
        if !(sp >= 0.0 && sp < self.t) {
            return Vec::new();
        }
        if self.factorized {
            let w = self.family.point_halfwidth(sp).unwrap_or(PI);
            if cyc_dist(theta, self.phi) > w {
                return Vec::new();
            }
            return match &self.family {
                AmbitFamily::FullAngle { lag } | AmbitFamily::Rectangular { lag, .. } => lag_window(lag, sp, self.t),
                AmbitFamily::WedgeOverS { lag, .. } => lag_window(&Schedule::constant(*lag), sp, self.t),
                _ => unreachable!("non-factorizing family"),
            };
        }
        scan_intervals(sp, self.t, |s| self.family.contains(s, self.phi, theta, sp))
    }

    /// f̄_t(θ, s'; φ).
    pub fn fbar(&self, theta: f64, sp: f64) -> f64 {
        self.fbar_over(theta, sp, &self.outer_times(theta, sp))
    }

    fn fbar_over(&self, theta: f64, sp: f64, intervals: &[(f64, f64)]) -> f64 {
        if !self.weight.depends_on_outer_time() {
            let len: f64 = intervals.iter().map(|(a, b)| b - a).sum();
            return self.weight.eval(self.t, theta, sp, self.phi) * len;
        }
        let breaks = self.weight.t_breaks(sp);
        intervals
            .iter()
            .map(|&(a, b)| {
                integrate_with_breaks(
                    |s| self.weight.eval(s, theta, sp, self.phi),
                    a,
                    b,
                    &breaks,
                    Tolerance::new(1e-15, 1e-12),
                )
            })
            .sum()
    }

    /// Membership in Ā_t(φ).
    pub fn in_union(&self, theta: f64, sp: f64) -> bool {
        !self.outer_times(theta, sp).is_empty()
    }
}

impl WeightField for InducedWeight {
    fn weight(&self, theta: f64, s: f64) -> Option<f64> {
        let iv = self.outer_times(theta, s);
        if iv.is_empty() {
            None
        } else {
            Some(self.fbar_over(theta, s, &iv))
        }
    }

    fn time_support(&self) -> (f64, f64) {
        (self.lower, self.t)
    }

    fn center(&self) -> f64 {
        self.phi
    }

    fn reach_on(&self, lo: f64, hi: f64) -> f64 {
        match &self.family {
            AmbitFamily::Rectangular { half_width, .. } => half_width.max_on(lo, hi).min(PI),
            AmbitFamily::WedgeOverS { theta, .. } => {
                if lo * PI <= *theta {
                    PI
                } else {
                    theta / lo
                }
            }
            _ => PI,
        }
    }
}
