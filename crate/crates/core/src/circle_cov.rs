//! Space-time covariances on the circle for full-angle ambit sets, and the
//! covariance geometry of constant weights over boundary-delimited sets.
//!
//! Covariances use the convention Cov = 2τ₀ + Σ_{k≥1} τ_k cos(kΔφ).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ambit::{time_overlap, AmbitFamily};
use crate::error::{invalid, Error, Result};
use crate::levy::ControlMeasure;
use crate::moments::LinearModel;
use crate::quadrature::{integrate_with_breaks, Tolerance};
use crate::schedule::Schedule;
use crate::weight::{FourierWeight, WeightFunction};

pub const DEFAULT_K_MAX: usize = 256;

fn quad_tol() -> Tolerance {
    Tolerance::new(1e-15, 1e-12)
}

/// τ_k(t₁, t₂) = π ∫_{t₁∩t₂} a_k^{t₁}(s) a_k^{t₂}(s) g(s) ds.
pub fn tau_k(weight: &FourierWeight, control: &ControlMeasure, lag: &Schedule, t1: f64, t2: f64, k: usize) -> f64 {
    let Some((lo, hi)) = time_overlap(t1, lag.eval(t1), t2, lag.eval(t2)) else {
        return 0.0;
    };
    if k >= weight.n_orders() {
        return 0.0;
    }
    let mut breaks = control.breakpoints();
    breaks.extend(weight.s_breaks(t1));
    breaks.extend(weight.s_breaks(t2));
    let f = |s: f64| weight.coefficient(k, t1, s) * weight.coefficient(k, t2, s) * control.density(s);
    PI * integrate_with_breaks(f, lo, hi, &breaks, quad_tol())
}

/// Linear model with a full-angle ambit set and a Fourier weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleCovModel {
    pub weight: FourierWeight,
    pub lag: Schedule,
    pub control: ControlMeasure,
    /// 𝕍(Z′), folded into the control measure.
    pub spot_variance: f64,
    pub k_max: usize,
}

impl CircleCovModel {
    pub fn new(weight: FourierWeight, lag: Schedule, control: ControlMeasure, spot_variance: f64) -> Self {
        CircleCovModel { weight, lag, control, spot_variance, k_max: DEFAULT_K_MAX }
    }

    /// Reads a general linear model, which must use the full-angle family.
    pub fn from_linear(model: &LinearModel) -> Result<Self> {
        let AmbitFamily::FullAngle { lag } = &model.ambit else {
            return Err(Error::AssumptionViolation("covariance series need the full-angle ambit family".into()));
        };
        let weight = match &model.weight {
            WeightFunction::Fourier { coefficients } => coefficients.clone(),
            WeightFunction::Constant { value } => FourierWeight::Constant { a: vec![*value] },
            WeightFunction::Tumour { .. } => {
                return Err(Error::AssumptionViolation("the tumour weight has no Fourier form here".into()))
            }
        };
        Ok(Self::new(weight, lag.clone(), model.basis.control.clone(), model.basis.spot.variance()))
    }

    fn scaled_control(&self) -> ControlMeasure {
        self.control.scaled(self.spot_variance)
    }

    pub fn n_terms(&self) -> usize {
        self.weight.n_orders().min(self.k_max + 1)
    }

    /// τ_k including the spot variance.
    pub fn tau(&self, t1: f64, t2: f64, k: usize) -> f64 {
        tau_k(&self.weight, &self.scaled_control(), &self.lag, t1, t2, k)
    }

    pub fn taus(&self, t1: f64, t2: f64) -> Vec<f64> {
        let control = self.scaled_control();
        (0..self.n_terms()).map(|k| tau_k(&self.weight, &control, &self.lag, t1, t2, k)).collect()
    }
}

/// Truncated series Cov(R_{t₁}(φ₁), R_{t₂}(φ₂)).
pub fn cov_full_angle(model: &CircleCovModel, t1: f64, phi1: f64, t2: f64, phi2: f64) -> f64 {
    series_value(&model.taus(t1, t2), phi1 - phi2)
}

fn series_value(taus: &[f64], delta: f64) -> f64 {
    taus.iter()
        .enumerate()
        .map(|(k, &tau)| if k == 0 { 2.0 * tau } else { tau * (k as f64 * delta).cos() })
        .sum()
}

/// Spatial correlation at lag Δφ when a_k^t(s) = a_k^t.
pub fn spatial_corr(a: &[f64], delta: f64) -> f64 {
    let sq = |k: usize| if k == 0 { 2.0 * a[0] * a[0] } else { a[k] * a[k] };
    let num: f64 = (0..a.len()).map(|k| if k == 0 { sq(0) } else { sq(k) * (k as f64 * delta).cos() }).sum();
    let den: f64 = (0..a.len()).map(sq).sum();
    if den == 0.0 {
        return 0.0;
    }
    num / den
}

/// Temporal correlation at a fixed angle when a_k^t = b_t c_k.
pub fn temporal_corr(model: &CircleCovModel, t1: f64, t2: f64) -> Result<f64> {
    match &model.weight {
        FourierWeight::Constant { .. } | FourierWeight::Separable { .. } => {}
        FourierWeight::Stationary { .. } => {
            return Err(Error::AssumptionViolation("temporal correlation needs coefficients free of s".into()))
        }
        FourierWeight::Tabulated { .. } => {
            let n = model.weight.n_orders();
            let r1: Vec<f64> = (0..n).map(|k| model.weight.coefficient(k, t1, 0.0)).collect();
            let r2: Vec<f64> = (0..n).map(|k| model.weight.coefficient(k, t2, 0.0)).collect();
            let dot: f64 = r1.iter().zip(&r2).map(|(a, b)| a * b).sum();
            let n1: f64 = r1.iter().map(|a| a * a).sum();
            let n2: f64 = r2.iter().map(|a| a * a).sum();
            if (dot * dot - n1 * n2).abs() > 1e-12 * n1 * n2 {
                return Err(Error::AssumptionViolation("coefficient rows at the two times are not proportional".into()));
            }
        }
    }
    let g = &model.control;
    let own = |t: f64| g.mass(t - model.lag.eval(t), t);
    let shared = match time_overlap(t1, model.lag.eval(t1), t2, model.lag.eval(t2)) {
        Some((lo, hi)) => g.mass(lo, hi),
        None => 0.0,
    };
    let den = (own(t1) * own(t2)).sqrt();
    if den == 0.0 {
        return Err(invalid("ambit sets carry no control mass"));
    }
    Ok(shared / den)
}

/// Coefficients a_k^t = [λ_k^t / (π ∫_{t−T(t)}^t g)]^{1/2}, one row per
/// time, so that τ_k(t, t) = λ_k^t.
pub fn coeffs_from_target(times: &[f64], lambdas: &[Vec<f64>], control: &ControlMeasure, lag: &Schedule) -> Result<FourierWeight> {
    if times.is_empty() || times.len() != lambdas.len() || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("targets need strictly increasing times and one row per time"));
    }
    let mut rows = Vec::with_capacity(times.len());
    for (&t, row) in times.iter().zip(lambdas) {
        let mass = control.mass(t - lag.eval(t), t);
        if !(mass > 0.0) {
            return Err(invalid(format!("ambit set at t = {t} carries no control mass")));
        }
        let mut a = Vec::with_capacity(row.len());
        for (k, &l) in row.iter().enumerate() {
            if !(l >= 0.0) {
                return Err(Error::NegativeTargetCoefficient { k, value: l });
            }
            a.push((l / (PI * mass)).sqrt());
        }
        rows.push(a);
    }
    Ok(FourierWeight::Tabulated { times: times.to_vec(), rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PthOrderParams {
    pub p: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl PthOrderParams {
    pub fn validate(&self) -> Result<()> {
        if self.p >= 1 && self.alpha > 0.0 && self.beta > 0.0 && self.alpha.is_finite() && self.beta.is_finite() {
            Ok(())
        } else {
            Err(invalid("p-th order model needs p >= 1, alpha > 0, beta > 0"))
        }
    }

    /// λ₀ … λ_{k_max}.
    pub fn lambdas(&self, k_max: usize) -> Vec<f64> {
        (0..=k_max).map(|k| pth_order_lambda(self, k)).collect()
    }

    /// Upper bound on Σ_{k>K} λ_k, valid for K ≥ 3.
    pub fn tail_bound(&self, k: usize) -> f64 {
        assert!(k >= 3, "tail bound needs K >= 3");
        let two_p = 2.0 * self.p as f64;
        let kk = k as f64;
        let c = 1.0 - (2.0 / (kk + 1.0)).powf(two_p);
        kk.powf(1.0 - two_p) / ((two_p - 1.0) * self.beta * c)
    }
}

/// λ_k = [α + β(k^{2p} − 2^{2p})]^{−1} for k ≥ 2, zero for k ∈ {0, 1}.
pub fn pth_order_lambda(params: &PthOrderParams, k: usize) -> f64 {
    if k < 2 {
        return 0.0;
    }
    let two_p = 2 * params.p as i32;
    1.0 / (params.alpha + params.beta * ((k as f64).powi(two_p) - 2f64.powi(two_p)))
}

/// λ coefficients of μ(A_t(0) ∩ A_t(φ)) = Σ λ_k cos(kφ) from the cosine
/// coefficients γ_k of h̄_t, in the published closed form: the constant
/// term uses 16/(πk²) and counts γ₀ in the even sum.
pub fn lambda_from_hbar(gammas: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (k, &g) in gammas.iter().enumerate() {
        if k % 2 == 1 {
            out[0] += (2.0 * PI - 16.0 / (PI * (k * k) as f64)) * g;
        } else {
            out[0] -= 2.0 * PI * g;
        }
    }
    fill_harmonics(gammas, &mut out);
    out
}

/// The same coefficients as [`lambda_from_hbar`] with the constant term
/// taken from a direct Fourier analysis of the overlap measure: odd k
/// contribute (2π − 8/(πk²))γ_k and a constant shift of h̄ cancels.
pub fn overlap_fourier_coefficients(gammas: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (k, &g) in gammas.iter().enumerate().skip(1) {
        if k % 2 == 1 {
            out[0] += (2.0 * PI - 8.0 / (PI * (k * k) as f64)) * g;
        } else {
            out[0] -= 2.0 * PI * g;
        }
    }
    fill_harmonics(gammas, &mut out);
    out
}

fn fill_harmonics(gammas: &[f64], out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate().skip(1) {
        let jj = (2 * j) as f64;
        *o = 16.0 / PI
            * gammas
                .iter()
                .enumerate()
                .filter(|(k, _)| k % 2 == 1)
                .map(|(k, &g)| g / (jj * jj - (k * k) as f64))
                .sum::<f64>();
    }
}

/// Σ λ_k cos(kφ).
pub fn overlap_series(lambdas: &[f64], phi: f64) -> f64 {
    lambdas.iter().enumerate().map(|(k, l)| l * (k as f64 * phi).cos()).sum()
}

/// (α_t, β_t) with (λ_j)^{−1} = α_t + β_t j² for h̄ = γ₀ + γ₁ cos φ.
pub fn first_harmonic_precision(gamma1: f64) -> (f64, f64) {
    (-PI / (16.0 * gamma1), PI / (4.0 * gamma1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CovRow {
    pub t1: f64,
    pub t2: f64,
    pub dphi: f64,
    pub cov: f64,
}

/// Covariances over all time pairs and lags.
pub fn covariance_table(model: &CircleCovModel, times: &[f64], lags: &[f64]) -> Vec<CovRow> {
    let mut rows = Vec::with_capacity(times.len() * times.len() * lags.len());
    for &t1 in times {
        for &t2 in times {
            let taus = model.taus(t1, t2);
            for &d in lags {
                rows.push(CovRow { t1, t2, dphi: d, cov: series_value(&taus, d) });
            }
        }
    }
    rows
}

/// Covariance matrix of R_t at `n` equally spaced angles.
pub fn angle_covariance_matrix(model: &CircleCovModel, t: f64, n: usize) -> DMatrix<f64> {
    let taus = model.taus(t, t);
    let step = 2.0 * PI / n as f64;
    DMatrix::from_fn(n, n, |i, j| series_value(&taus, (i as f64 - j as f64) * step))
}

pub fn min_eigenvalue(m: DMatrix<f64>) -> f64 {
    m.symmetric_eigenvalues().min()
}
