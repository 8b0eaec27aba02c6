//! Fourier coefficients of radial profiles and their Gaussian likelihood.
//!
//! A_k = (1/π)∫ R(φ) cos(kφ) dφ and B_k = (1/π)∫ R(φ) sin(kφ) dφ, evaluated
//! with the trapezoid rule on the uniform grid φ_j = −π + 2πj/N. With this
//! normalization R(φ) = A₀/2 + Σ_{k≥1} (A_k cos kφ + B_k sin kφ) and, for a
//! profile band-limited to K < N/2,
//! (2/N) Σ_j R(φ_j)² = A₀²/2 + Σ_{k=1}^{K} (A_k² + B_k²).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::circle_cov::CircleCovModel;
use crate::error::{invalid, Error, Result};
use crate::moments::LinearModel;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierSeries {
    /// A₀ … A_K.
    pub a: Vec<f64>,
    /// B₀ … B_K, with B₀ = 0.
    pub b: Vec<f64>,
}

impl FourierSeries {
    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    /// A₀/2 + Σ (A_k cos kφ + B_k sin kφ).
    pub fn reconstruct(&self, phi: f64) -> f64 {
        let mut v = 0.5 * self.a[0];
        for k in 1..self.a.len() {
            let x = k as f64 * phi;
            v += self.a[k] * x.cos() + self.b[k] * x.sin();
        }
        v
    }

    /// A₀²/2 + Σ_{k≥1} (A_k² + B_k²), equal to (1/π)∫R² for band-limited R.
    pub fn energy(&self) -> f64 {
        0.5 * self.a[0] * self.a[0] + (1..self.a.len()).map(|k| self.a[k] * self.a[k] + self.b[k] * self.b[k]).sum::<f64>()
    }
}

/// (2/N) Σ R(φ_j)², the trapezoid value of (1/π)∫R².
pub fn profile_energy(profile: &[f64]) -> f64 {
    2.0 * profile.iter().map(|r| r * r).sum::<f64>() / profile.len() as f64
}

/// Coefficients up to order `k_max` of a profile sampled at φ_j = −π + 2πj/N.
pub fn radial_fourier(profile: &[f64], k_max: usize) -> Result<FourierSeries> {
    let n = profile.len();
    if n == 0 {
        return Err(invalid("empty profile"));
    }
    if 2 * k_max >= n {
        return Err(Error::Alias { k: k_max, n });
    }
    let step = 2.0 * PI / n as f64;
    let scale = 2.0 / n as f64;
    let mut a = vec![0.0; k_max + 1];
    let mut b = vec![0.0; k_max + 1];
    for k in 0..=k_max {
        let (mut sa, mut sb) = (0.0, 0.0);
        for (j, r) in profile.iter().enumerate() {
            // k·φ_j reduced exactly modulo 2π before the trig call.
            let m = ((k * j) % n) as f64;
            let x = -(k as f64) * PI + m * step;
            sa += r * x.cos();
            sb += r * x.sin();
        }
        a[k] = scale * sa;
        b[k] = if k == 0 { 0.0 } else { scale * sb };
    }
    Ok(FourierSeries { a, b })
}

/// (Cov(A_k^t, A_j^{t′}), Cov(B_k^t, B_j^{t′}), Cov(A_k^t, B_j^{t′})) for the
/// stochastic part of a full-angle model. Orders differ: all zero. Equal
/// order k ≥ 1: (τ_k, τ_k, 0). Order 0: (8τ₀, 0, 0), since A₀ = 2∫a₀ dZ and
/// B₀ ≡ 0.
pub fn fourier_cov_structure(model: &LinearModel, t1: f64, t2: f64, k: usize, j: usize) -> Result<(f64, f64, f64)> {
    let cm = CircleCovModel::from_linear(model)?;
    Ok(fourier_cov_from(&cm, t1, t2, k, j))
}

pub fn fourier_cov_from(model: &CircleCovModel, t1: f64, t2: f64, k: usize, j: usize) -> (f64, f64, f64) {
    if k != j {
        return (0.0, 0.0, 0.0);
    }
    let tau = model.tau(t1, t2, k);
    if k == 0 {
        (8.0 * tau, 0.0, 0.0)
    } else {
        (tau, tau, 0.0)
    }
}

/// Σ over orders 1..=K and the A and B channels of independent zero-mean
/// multivariate normal log-densities with covariance [τ_k(t_i, t_l)].
/// `series[i]` holds the coefficients at `times[i]`; subtract any mean
/// first.
pub fn gaussian_loglik(
    times: &[f64],
    series: &[FourierSeries],
    orders: usize,
    tau: impl Fn(f64, f64, usize) -> f64,
) -> Result<f64> {
    gaussian_loglik_replicates(times, std::slice::from_ref(&series.to_vec()), orders, tau)
}

/// [`gaussian_loglik`] summed over independent replicates, each a series
/// per time; Gram matrices are factorized once.
pub fn gaussian_loglik_replicates(
    times: &[f64],
    replicates: &[Vec<FourierSeries>],
    orders: usize,
    tau: impl Fn(f64, f64, usize) -> f64,
) -> Result<f64> {
    let n = times.len();
    if n == 0 || replicates.is_empty() || replicates.iter().any(|r| r.len() != n) {
        return Err(invalid("need one coefficient series per time"));
    }
    if orders == 0 || replicates.iter().flatten().any(|s| s.order() < orders) {
        return Err(invalid(format!("every series needs orders 1..={orders}")));
    }
    let mut total = 0.0;
    for k in 1..=orders {
        let gram = DMatrix::from_fn(n, n, |i, l| tau(times[i], times[l], k));
        let chol = cholesky_checked(gram)?;
        let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let norm = n as f64 * (2.0 * PI).ln() + log_det;
        for series in replicates {
            for x in [DVector::from_fn(n, |i, _| series[i].a[k]), DVector::from_fn(n, |i, _| series[i].b[k])] {
                let y = chol.solve(&x);
                total += -0.5 * (norm + x.dot(&y));
            }
        }
    }
    Ok(total)
}

/// Log-likelihood under a circle covariance model.
pub fn model_loglik(model: &CircleCovModel, times: &[f64], series: &[FourierSeries], orders: usize) -> Result<f64> {
    gaussian_loglik(times, series, orders, |a, b, k| model.tau(a, b, k))
}

fn cholesky_checked(m: DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let max_diag = m.diagonal().iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let chol = m.cholesky().ok_or(Error::SingularCovariance)?;
    let min_pivot = chol.l_dirty().diagonal().iter().fold(f64::INFINITY, |a, b| a.min(*b));
    if !(max_diag > 0.0) || min_pivot * min_pivot <= 1e-12 * max_diag {
        return Err(Error::SingularCovariance);
    }
    Ok(chol)
}
