//! Bounded multi-start Nelder-Mead.
//!
//! The search runs in the unit cube; vertices are projected back onto it
//! after every move. Each start runs to convergence, then restarts from its
//! best point with a fresh simplex of edge `restart_edge`, and keeps
//! restarting while a restart lowers the value by more than the tolerance,
//! at most `max_restarts` times.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchOptions {
    pub starts: usize,
    /// Objective evaluations per start, restarts included.
    pub max_evaluations: usize,
    pub ftol_abs: f64,
    pub ftol_rel: f64,
    /// Simplex diameter in unit-cube coordinates.
    pub xtol: f64,
    pub initial_edge: f64,
    pub restart_edge: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            starts: 4,
            max_evaluations: 4000,
            ftol_abs: 1e-14,
            ftol_rel: 1e-10,
            xtol: 1e-7,
            initial_edge: 0.25,
            restart_edge: 0.05,
            max_restarts: 3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub x: Vec<f64>,
    pub value: f64,
    /// Best value after every iteration of the winning start.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
    /// The Hessian at the optimum is numerically singular.
    pub non_identifiable: bool,
}

pub fn check_bounds(lo: &[f64], hi: &[f64]) -> Result<()> {
    if lo.is_empty() || lo.len() != hi.len() {
        return Err(Error::InfeasibleBounds("need one lower and one upper bound per free parameter".into()));
    }
    for (i, (l, h)) in lo.iter().zip(hi).enumerate() {
        if !(l.is_finite() && h.is_finite() && l < h) {
            return Err(Error::InfeasibleBounds(format!("parameter {i}: [{l}, {h}] is empty or not finite")));
        }
    }
    Ok(())
}

struct Start {
    u: Vec<f64>,
    value: f64,
    trace: Vec<f64>,
    evaluations: usize,
    converged: bool,
}

fn clamp01(u: &mut [f64]) {
    for v in u {
        *v = v.clamp(0.0, 1.0);
    }
}

fn simplex_around(u: &[f64], edge: f64) -> Vec<Vec<f64>> {
    let mut s = vec![u.to_vec()];
    for i in 0..u.len() {
        let mut v = u.to_vec();
        v[i] = if u[i] + edge <= 1.0 { u[i] + edge } else { u[i] - edge };
        clamp01(&mut v);
        s.push(v);
    }
    s
}

fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    edge: f64,
    budget: usize,
    opts: &SearchOptions,
    trace: &mut Vec<f64>,
) -> (Vec<f64>, f64, usize, bool) {
    let n = start.len();
    let mut pts = simplex_around(start, edge);
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = pts.len();
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        trace.push(vals[0]);
        let spread = vals[n] - vals[0];
        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.ftol_abs + opts.ftol_rel * vals[0].abs() || diameter <= opts.xtol {
            return (pts[0].clone(), vals[0], evals, true);
        }
        if evals >= budget {
            return (pts[0].clone(), vals[0], evals, false);
        }
        let centroid: Vec<f64> = (0..n).map(|i| pts[..n].iter().map(|p| p[i]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| {
            let mut v: Vec<f64> = centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect();
            clamp01(&mut v);
            v
        };
        let xr = along(1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            };
            evals += 1;
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let mut v: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, p)| b + 0.5 * (p - b)).collect();
                    clamp01(&mut v);
                    vals[i] = f(&v);
                    pts[i] = v;
                }
                evals += n;
            }
        }
    }
}

fn run_start(f: &dyn Fn(&[f64]) -> f64, u0: Vec<f64>, opts: &SearchOptions) -> Start {
    let mut trace = Vec::new();
    let (mut u, mut value, mut evals, mut converged) =
        nelder_mead(f, &u0, opts.initial_edge, opts.max_evaluations, opts, &mut trace);
    for _ in 0..opts.max_restarts {
        if !converged || evals >= opts.max_evaluations {
            break;
        }
        let budget = opts.max_evaluations - evals;
        let (u2, v2, e2, c2) = nelder_mead(f, &u, opts.restart_edge, budget, opts, &mut trace);
        evals += e2;
        let improved = value - v2 > opts.ftol_abs + opts.ftol_rel * value.abs();
        if v2 <= value {
            u = u2;
            value = v2;
        }
        converged = c2;
        if !improved {
            break;
        }
    }
    // Keep the trace monotone across restarts.
    let mut best = f64::INFINITY;
    for v in &mut trace {
        best = best.min(*v);
        *v = best;
    }
    Start { u, value, trace, evaluations: evals, converged }
}

/// Central-difference Hessian in unit coordinates, stepping inward at the
/// box faces.
fn unit_hessian(f: &dyn Fn(&[f64]) -> f64, u: &[f64], h: f64) -> DMatrix<f64> {
    let n = u.len();
    let centre: Vec<f64> = u.iter().map(|v| v.clamp(h, 1.0 - h)).collect();
    let at = |di: &[(usize, f64)]| {
        let mut v = centre.clone();
        for &(i, d) in di {
            v[i] += d;
        }
        f(&v)
    };
    let f0 = at(&[]);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (at(&[(i, h)]) - 2.0 * f0 + at(&[(i, -h)])) / (h * h)
        } else {
            (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    })
}

/// Minimize `f` over the box [lo, hi]. `x0`, if given, seeds the first start;
/// the others are drawn uniformly from the box.
pub fn minimize_bounded(
    f: impl Fn(&[f64]) -> f64 + Sync,
    lo: &[f64],
    hi: &[f64],
    x0: Option<&[f64]>,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    check_bounds(lo, hi)?;
    let n = lo.len();
    let to_x = |u: &[f64]| -> Vec<f64> { (0..n).map(|i| lo[i] + u[i] * (hi[i] - lo[i])).collect() };
    let g = |u: &[f64]| {
        let v = f(&to_x(u));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(opts.starts.max(1));
    starts.push(match x0 {
        Some(x) => {
            if x.len() != n {
                return Err(Error::InfeasibleBounds("start point has the wrong dimension".into()));
            }
            let mut u: Vec<f64> = (0..n).map(|i| (x[i] - lo[i]) / (hi[i] - lo[i])).collect();
            clamp01(&mut u);
            u
        }
        None => vec![0.5; n],
    });
    for s in 1..opts.starts.max(1) {
        let mut r = rng::stream(opts.seed, s as u64);
        starts.push((0..n).map(|_| r.random::<f64>()).collect());
    }
    let results: Vec<Start> = starts.into_par_iter().map(|u| run_start(&g, u, opts)).collect();
    let total: usize = results.iter().map(|s| s.evaluations).sum();
    let best = results
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(_, s)| s)
        .expect("at least one start");
    if !best.converged {
        return Err(Error::NonConvergence { evaluations: total });
    }
    let hess = unit_hessian(&g, &best.u, 1e-4);
    let eig = hess.symmetric_eigenvalues();
    let (emin, emax) = eig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| (a.min(e), b.max(e)));
    let non_identifiable = !(emax > 0.0) || emin <= 1e-6 * emax;
    Ok(SearchResult {
        x: to_x(&best.u),
        value: best.value,
        trace: best.trace,
        evaluations: total,
        converged: true,
        non_identifiable,
    })
}
