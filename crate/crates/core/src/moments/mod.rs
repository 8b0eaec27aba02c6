//! Moments of linear ambit fields X_t(φ) = ∫_{A_t(φ)} f_t(ξ; φ) Z(dξ).
//!
//! Two evaluation modes exist. `Adaptive` integrates over the continuum.
//! `Mesh` returns the exact moments of the lattice-discretized field that
//! the simulator draws, which is what Monte Carlo checks compare against.

mod cover;
mod mc;

use serde::{Deserialize, Serialize};

pub use mc::{jackknife, mc_verify, McReport, Statistic};

use crate::ambit::AmbitFamily;
use crate::discretize::{AmbitWeight, Discretization, PointKernel};
use crate::error::{invalid, Error, Result};
use crate::levy::{BasisSpec, GridSpec};
use crate::weight::WeightFunction;
use cover::{cover_integral, Cover};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearModel {
    pub weight: WeightFunction,
    pub ambit: AmbitFamily,
    pub basis: BasisSpec,
}

impl LinearModel {
    pub fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        self.ambit.validate()?;
        self.basis.validate()
    }

    pub fn field(&self, p: Point) -> AmbitWeight {
        AmbitWeight { family: self.ambit.clone(), weight: self.weight.clone(), t: p.t, phi: p.phi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: f64,
    pub phi: f64,
}

impl Point {
    pub fn new(t: f64, phi: f64) -> Self {
        Point { t, phi }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MomentMode {
    Adaptive,
    Mesh { grid: GridSpec, disc: Discretization },
}

#[derive(Clone, Debug)]
pub struct ModelMomentQuery {
    pub model: LinearModel,
    pub points: Vec<Point>,
    pub lambdas: Vec<f64>,
    pub mode: MomentMode,
}

impl ModelMomentQuery {
    pub fn new(model: LinearModel, points: Vec<Point>) -> Self {
        ModelMomentQuery { model, points, lambdas: Vec::new(), mode: MomentMode::Adaptive }
    }

    pub fn with_lambdas(mut self, lambdas: Vec<f64>) -> Self {
        self.lambdas = lambdas;
        self
    }

    pub fn with_mode(mut self, mode: MomentMode) -> Self {
        self.mode = mode;
        self
    }

    fn need_points(&self, k: usize) -> Result<()> {
        self.model.validate()?;
        if self.points.len() < k {
            return Err(invalid(format!("query needs {k} points, got {}", self.points.len())));
        }
        Ok(())
    }

    /// Mesh mode is exact only for lattice increments; Poisson draws keep
    /// their atoms, so they always use the continuum.
    fn mesh(&self) -> Option<(&GridSpec, Discretization)> {
        match &self.mode {
            MomentMode::Mesh { grid, disc } if !self.model.basis.spot.is_poisson() => Some((grid, *disc)),
            _ => None,
        }
    }

    fn kernels(&self, grid: &GridSpec, disc: Discretization, k: usize) -> Result<Vec<PointKernel>> {
        self.points[..k]
            .iter()
            .map(|p| PointKernel::build(&self.model.field(*p), grid, &self.model.basis, disc))
            .collect()
    }
}

fn cell_measures(basis: &BasisSpec, grid: &GridSpec) -> Vec<f64> {
    basis.row_measures(grid)
}

/// Dense per-cell accumulation of Σ_j λ_j w_jc over the kernels.
fn combine(grid: &GridSpec, kernels: &[PointKernel], lambdas: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut acc = vec![0.0; grid.n_cells()];
    let mut touched = vec![false; grid.n_cells()];
    let mut cells = Vec::new();
    for (k, l) in kernels.iter().zip(lambdas) {
        for &(c, w) in &k.entries {
            acc[c] += l * w;
            if !touched[c] {
                touched[c] = true;
                cells.push(c);
            }
        }
    }
    (acc, cells)
}

/// E X_t(φ) for the first query point.
pub fn mean_linear(q: &ModelMomentQuery) -> Result<f64> {
    q.need_points(1)?;
    let m = q.model.basis.spot.mean();
    if let Some((grid, disc)) = q.mesh() {
        let mu = cell_measures(&q.model.basis, grid);
        let k = &q.kernels(grid, disc, 1)?[0];
        return Ok(m * k.entries.iter().map(|&(c, w)| w * mu[c / grid.n_angles]).sum::<f64>());
    }
    Ok(m * cover_integral(&q.model, &q.points[..1], Cover::Union, |w| w[0].unwrap_or(0.0)))
}

/// Var X_t(φ) for the first query point.
pub fn var_linear(q: &ModelMomentQuery) -> Result<f64> {
    q.need_points(1)?;
    let mut q2 = q.clone();
    q2.points = vec![q.points[0], q.points[0]];
    cov_linear(&q2)
}

/// Cov(X_{t1}(φ1), X_{t2}(φ2)) for the first two query points.
pub fn cov_linear(q: &ModelMomentQuery) -> Result<f64> {
    q.need_points(2)?;
    let v = q.model.basis.spot.variance();
    if let Some((grid, disc)) = q.mesh() {
        let mu = cell_measures(&q.model.basis, grid);
        let ks = q.kernels(grid, disc, 2)?;
        let mut w1 = vec![0.0; grid.n_cells()];
        for &(c, w) in &ks[0].entries {
            w1[c] += w;
        }
        return Ok(v * ks[1].entries.iter().map(|&(c, w)| w1[c] * w * mu[c / grid.n_angles]).sum::<f64>());
    }
    Ok(v * cover_integral(&q.model, &q.points[..2], Cover::Intersection, |w| {
        w[0].unwrap_or(0.0) * w[1].unwrap_or(0.0)
    }))
}

/// E exp(Σ_j λ_j X_j) = exp ∫ K(Σ_j λ_j f_j 1_{A_j}) dμ.
pub fn mixed_exp_moment(q: &ModelMomentQuery) -> Result<f64> {
    let n = q.points.len();
    q.need_points(1)?;
    if q.lambdas.len() != n {
        return Err(invalid("one λ per point is required"));
    }
    let spot = &q.model.basis.spot;
    if let Some((grid, disc)) = q.mesh() {
        let mu = cell_measures(&q.model.basis, grid);
        let ks = q.kernels(grid, disc, n)?;
        let (acc, cells) = combine(grid, &ks, &q.lambdas);
        let mut total = 0.0;
        for c in cells {
            total += mu[c / grid.n_angles] * spot.kumulant(acc[c])?;
        }
        return Ok(total.exp());
    }
    let bad = std::cell::Cell::new(None);
    let v = cover_integral(&q.model, &q.points, Cover::Union, |w| {
        let arg: f64 = w.iter().zip(&q.lambdas).map(|(x, l)| l * x.unwrap_or(0.0)).sum();
        spot.kumulant(arg).unwrap_or_else(|_| {
            bad.set(Some(arg));
            0.0
        })
    });
    if let Some(theta) = bad.get() {
        return Err(Error::KumulantDomain { law: spot.name(), theta });
    }
    Ok(v.exp())
}

/// E[e^{X1 + X2}] / (E e^{X1} E e^{X2}) = exp ∫_{A1∩A2} [K(f1+f2) − K(f1) − K(f2)] dμ.
pub fn relative_moment(q: &ModelMomentQuery) -> Result<f64> {
    q.need_points(2)?;
    let spot = &q.model.basis.spot;
    if let Some((grid, disc)) = q.mesh() {
        let mu = cell_measures(&q.model.basis, grid);
        let ks = q.kernels(grid, disc, 2)?;
        let mut w1 = vec![None; grid.n_cells()];
        for &(c, w) in &ks[0].entries {
            w1[c] = Some(w);
        }
        let mut total = 0.0;
        for &(c, b) in &ks[1].entries {
            if let Some(a) = w1[c] {
                total += mu[c / grid.n_angles] * (spot.kumulant(a + b)? - spot.kumulant(a)? - spot.kumulant(b)?);
            }
        }
        return Ok(total.exp());
    }
    let bad = std::cell::Cell::new(None);
    let v = cover_integral(&q.model, &q.points[..2], Cover::Intersection, |w| {
        let (a, b) = (w[0].unwrap_or(0.0), w[1].unwrap_or(0.0));
        match (spot.kumulant(a + b), spot.kumulant(a), spot.kumulant(b)) {
            (Ok(x), Ok(y), Ok(z)) => x - y - z,
            _ => {
                bad.set(Some(a.max(b).max(a + b)));
                0.0
            }
        }
    });
    if let Some(theta) = bad.get() {
        return Err(Error::KumulantDomain { law: spot.name(), theta });
    }
    Ok(v.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{ControlMeasure, SpotLaw};
    use crate::schedule::Schedule;
    use std::f64::consts::PI;

    fn rect_model(spot: SpotLaw) -> LinearModel {
        LinearModel {
            weight: WeightFunction::constant(1.0),
            ambit: AmbitFamily::Rectangular { half_width: Schedule::constant(0.5), lag: Schedule::constant(2.0) },
            basis: BasisSpec::new(spot, ControlMeasure::Linear { a: 3.0 }),
        }
    }

    #[test]
    fn constant_weight_moments_are_measures() {
        let model = rect_model(SpotLaw::Gaussian { drift: 0.5, variance: 2.0 });
        let p1 = Point::new(5.0, 0.0);
        let p2 = Point::new(6.0, 0.3);
        let m12 = model.ambit.intersection_measure(5.0, 0.0, 6.0, 0.3, &model.basis.control);
        let q = ModelMomentQuery::new(model.clone(), vec![p1, p2]);
        assert!((cov_linear(&q).unwrap() - 2.0 * m12).abs() < 1e-9 * m12);
        let m1 = model.ambit.measure(5.0, &model.basis.control);
        assert!((mean_linear(&q).unwrap() - 0.5 * m1).abs() < 1e-9 * m1);
    }

    #[test]
    fn relative_moment_of_gaussian_is_exp_cov() {
        let model = rect_model(SpotLaw::Gaussian { drift: 0.5, variance: 0.01 });
        let q = ModelMomentQuery::new(model, vec![Point::new(5.0, 0.0), Point::new(5.5, 0.4)]);
        let c = cov_linear(&q).unwrap();
        assert!((relative_moment(&q).unwrap() - c.exp()).abs() < 1e-9);
    }

    #[test]
    fn mesh_and_continuum_agree_on_aligned_sets() {
        let model = LinearModel {
            weight: WeightFunction::constant(1.0),
            ambit: AmbitFamily::Rectangular { half_width: Schedule::constant(PI / 8.0), lag: Schedule::constant(3.0) },
            basis: BasisSpec::new(SpotLaw::Gamma { shape: 1.0, rate: 4.0 }, ControlMeasure::lebesgue()),
        };
        let grid = GridSpec::new(64, 1.0, 0.0, 10.0).unwrap();
        let pts = vec![Point::new(7.0, grid.angle(3)), Point::new(8.0, grid.angle(7))];
        let a = ModelMomentQuery::new(model.clone(), pts.clone()).with_lambdas(vec![1.0, 0.5]);
        let m = a.clone().with_mode(MomentMode::Mesh { grid, disc: Discretization::default() });
        for (x, y) in [
            (cov_linear(&a).unwrap(), cov_linear(&m).unwrap()),
            (mean_linear(&a).unwrap(), mean_linear(&m).unwrap()),
            (mixed_exp_moment(&a).unwrap(), mixed_exp_moment(&m).unwrap()),
            (relative_moment(&a).unwrap(), relative_moment(&m).unwrap()),
        ] {
            assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn kumulant_domain_is_reported() {
        let model = rect_model(SpotLaw::Gamma { shape: 1.0, rate: 1.0 });
        let q = ModelMomentQuery::new(model, vec![Point::new(5.0, 0.0)]).with_lambdas(vec![2.0]);
        assert!(matches!(mixed_exp_moment(&q), Err(Error::KumulantDomain { .. })));
    }
}
