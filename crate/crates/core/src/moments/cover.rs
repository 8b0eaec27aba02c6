//! Continuum integrals over unions and intersections of ambit sets.
//!
//! At each time s the active sets are arcs on the circle. Their endpoints
//! cut the circle into pieces with a fixed membership pattern, and the
//! integrand is integrated piece by piece; the outer integral over s is
//! adaptive with breakpoints at every window edge and weight jump.

use std::f64::consts::PI;

use super::{LinearModel, Point};
use crate::ambit::{cyc_dist, wrap};
use crate::quadrature::{integrate, integrate_with_breaks, Tolerance};

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cover {
    Union,
    Intersection,
}

const OUTER: Tolerance = Tolerance::new(1e-15, 1e-11);
const INNER: Tolerance = Tolerance::new(1e-15, 1e-11);

/// ∫ F(weights) g(s) dθ ds where `weights[j]` is Some(f_j(θ, s)) when
/// (θ, s) ∈ A_j and None otherwise. F is only called with at least one
/// active set (Union) or all sets active (Intersection).
pub(crate) fn cover_integral<F>(model: &LinearModel, points: &[Point], cover: Cover, f: F) -> f64
where
    F: Fn(&[Option<f64>]) -> f64,
{
    let fam = &model.ambit;
    let windows: Vec<(f64, f64)> = points.iter().map(|p| fam.window(p.t)).collect();
    let (lo, hi) = match cover {
        Cover::Union => (
            windows.iter().map(|w| w.0).fold(f64::INFINITY, f64::min),
            windows.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max),
        ),
        Cover::Intersection => (
            windows.iter().map(|w| w.0).fold(f64::NEG_INFINITY, f64::max),
            windows.iter().map(|w| w.1).fold(f64::INFINITY, f64::min),
        ),
    };
    if !(hi > lo) {
        return 0.0;
    }
    let mut breaks = model.basis.control.breakpoints();
    for p in points {
        breaks.extend(fam.breakpoints(p.t));
        breaks.extend(model.weight.s_breaks(p.t));
    }
    let angle_free = model.weight.is_angle_free();
    let n = points.len();
    let slice = |s: f64| -> f64 {
        let g = model.basis.control.density(s);
        if g == 0.0 {
            return 0.0;
        }
        let widths: Vec<Option<f64>> = points.iter().map(|p| fam.halfwidth(p.t, s)).collect();
        if cover == Cover::Intersection && widths.iter().any(Option::is_none) {
            return 0.0;
        }
        let mut cuts = vec![-PI, PI];
        for (p, w) in points.iter().zip(&widths) {
            if let Some(w) = *w {
                if w < PI {
                    cuts.push(wrap(p.phi - w));
                    cuts.push(wrap(p.phi + w));
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut mask = vec![false; n];
        let mut buf = vec![None; n];
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if !(b > a) {
                continue;
            }
            let mid = 0.5 * (a + b);
            let mut any = false;
            let mut all = true;
            for j in 0..n {
                mask[j] = widths[j].is_some_and(|w| cyc_dist(mid, points[j].phi) <= w);
                any |= mask[j];
                all &= mask[j];
            }
            if !any || (cover == Cover::Intersection && !all) {
                continue;
            }
            let eval = |theta: f64, buf: &mut Vec<Option<f64>>| {
                for j in 0..n {
                    buf[j] = mask[j].then(|| model.weight.eval(points[j].t, theta, s, points[j].phi));
                }
                f(buf)
            };
            if angle_free {
                total += (b - a) * eval(mid, &mut buf);
            } else {
                let cell = std::cell::RefCell::new(vec![None; n]);
                total += integrate(|th| eval(th, &mut cell.borrow_mut()), a, b, INNER);
            }
        }
        g * total
    };
    integrate_with_breaks(slice, lo, hi, &breaks, OUTER)
}
