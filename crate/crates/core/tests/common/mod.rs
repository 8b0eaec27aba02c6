#![allow(dead_code)]

use std::f64::consts::PI;

use levy_growth::ambit::mu_self_intersection_direct;
use levy_growth::quadrature::{integrate_with_breaks, Tolerance};

/// h̄(θ) = Σ γ_k cos(kθ).
pub fn hbar_series(gammas: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |x| gammas.iter().enumerate().map(|(k, g)| g * (k as f64 * x).cos()).sum()
}

/// μ(A(0) ∩ A(φ)) = ∫ [min(h̄(θ), h̄(θ − φ)) − h̄(π)] dθ, straight from the
/// set definition.
pub fn overlap_by_min(hbar: &dyn Fn(f64) -> f64, phi: f64) -> f64 {
    let floor = hbar(PI);
    let f = |th: f64| hbar(th).min(hbar(th - phi)) - floor;
    let half = 0.5 * phi;
    let breaks = [half, half - PI, half + PI];
    integrate_with_breaks(f, -PI, PI, &breaks, Tolerance::new(1e-15, 1e-12))
}

/// Cosine coefficients of φ ↦ μ(A(0) ∩ A(φ)) from the closed-form overlap
/// integral sampled on `n` angles (trapezoid rule).
pub fn overlap_coefficients_by_quadrature(gammas: &[f64], n: usize, orders: usize) -> Vec<f64> {
    let h = hbar_series(gammas);
    let vals: Vec<f64> = (0..n).map(|i| mu_self_intersection_direct(&h, -PI + 2.0 * PI * i as f64 / n as f64)).collect();
    (0..=orders)
        .map(|k| {
            let s: f64 = vals
                .iter()
                .enumerate()
                .map(|(i, v)| v * (k as f64 * (-PI + 2.0 * PI * i as f64 / n as f64)).cos())
                .sum();
            if k == 0 {
                s / n as f64
            } else {
                2.0 * s / n as f64
            }
        })
        .collect()
}

/// A non-increasing h̄ on [0, π] with harmonics up to order 5.
pub const FIVE_HARMONICS: [f64; 6] = [3.0, 1.0, 0.2, 0.15, 0.05, 0.02];

/// Mean and standard error of a sample.
pub fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Sample variance and the standard error of that variance estimate.
pub fn var_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let d2: Vec<f64> = x.iter().map(|v| (v - m).powi(2)).collect();
    let var = d2.iter().sum::<f64>() / (n - 1.0);
    let (_, se) = mean_se(&d2);
    (var, se)
}

/// Sample covariance and its standard error.
pub fn cov_se(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let c = p.iter().sum::<f64>() / (n - 1.0);
    let (_, se) = mean_se(&p);
    (c, se)
}
