use std::f64::consts::PI;

use serde::Serialize;

use super::model::{GrowthKind, GrowthModelSpec};
use crate::ambit::{wrap, InducedWeight};
use crate::discretize::{
    support_rows, AmbitWeight, Discretization, ProfileKernel, RowPrefixes, WeightField,
};
use crate::error::{invalid, Error, Result};
use crate::levy::{sample_rows, BasisRealization, GridSpec};
use crate::rng;

/// Simulated radial profiles at the requested times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthHistory {
    pub times: Vec<f64>,
    pub angles: Vec<f64>,
    /// `radii[i][j]` = R_{times[i]}(angles[j]).
    pub radii: Vec<Vec<f64>>,
    pub seed: u64,
    pub spec_hash: u64,
    pub grid: GridSpec,
    /// Number of non-positive radii produced (kept, not clamped).
    pub non_positive: usize,
}

enum TimeKernel {
    Lattice(ProfileKernel),
    Points(Box<dyn WeightField + Send + Sync>),
}

/// A growth model with its lattice kernels built once, ready to draw many
/// replicates.
pub struct CompiledModel {
    spec: GrowthModelSpec,
    grid: GridSpec,
    times: Vec<f64>,
    kernels: Vec<TimeKernel>,
    rows: Vec<bool>,
    /// Deterministic part per time and angle: R₀ + μ̄, μ, or log-scale drift.
    drift: Vec<Vec<f64>>,
    multiplier: Vec<f64>,
    spec_hash: u64,
}

fn reference_field(spec: &GrowthModelSpec, t: f64) -> Box<dyn WeightField + Send + Sync> {
    if spec.kind.is_rate() {
        Box::new(InducedWeight::new(spec.ambit.clone(), spec.weight.clone(), t, -PI))
    } else {
        Box::new(AmbitWeight { family: spec.ambit.clone(), weight: spec.weight.clone(), t, phi: -PI })
    }
}

pub fn spec_hash(spec: &GrowthModelSpec) -> u64 {
    rng::fnv1a(serde_json::to_string(spec).expect("spec serializes").as_bytes())
}

impl CompiledModel {
    pub fn new(spec: &GrowthModelSpec, grid: &GridSpec, times: &[f64], disc: Discretization) -> Result<Self> {
        grid.validate()?;
        spec.validate(grid.n_angles)?;
        if times.is_empty() {
            return Err(invalid("at least one output time is required"));
        }
        for &t in times {
            if !(t >= grid.t_min - 1e-9 && t <= grid.t_max + 1e-9) {
                return Err(invalid(format!("time {t} lies outside the grid window [{}, {}]", grid.t_min, grid.t_max)));
            }
        }
        let poisson = spec.basis.spot.is_poisson();
        let mut rows = vec![false; grid.n_rows()];
        let mut kernels = Vec::with_capacity(times.len());
        for &t in times {
            let field = reference_field(spec, t);
            for r in support_rows(field.as_ref(), grid, &spec.basis.control)? {
                rows[r] = true;
            }
            if poisson {
                kernels.push(TimeKernel::Points(field));
            } else {
                let k = ProfileKernel::build(field.as_ref(), grid, &spec.basis, disc)?;
                if matches!(spec.kind, GrowthKind::ExponentialTumour | GrowthKind::RateOfLog) {
                    let sup = spec.basis.spot.kumulant_sup();
                    let w = k.max_weight();
                    if w >= sup {
                        return Err(Error::KumulantDomain { law: spec.basis.spot.name(), theta: w });
                    }
                }
                kernels.push(TimeKernel::Lattice(k));
            }
        }
        let n = grid.n_angles;
        let drift = times
            .iter()
            .map(|&t| {
                (0..n)
                    .map(|j| match spec.kind {
                        GrowthKind::RateLinear => spec.initial.eval(j) + spec.drift.integral(t, j),
                        GrowthKind::RateOfLog => spec.drift.integral(t, j),
                        _ => spec.drift.value(t, j),
                    })
                    .collect()
            })
            .collect();
        let multiplier = match &spec.multiplier {
            Some(m) => (0..n).map(|j| m.eval(grid.angle(j), j)).collect(),
            None => vec![1.0; n],
        };
        Ok(CompiledModel {
            spec: spec.clone(),
            grid: grid.clone(),
            times: times.to_vec(),
            kernels,
            rows,
            drift,
            multiplier,
            spec_hash: spec_hash(spec),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Draw the basis for `seed` on the rows the model needs.
    pub fn realize(&self, seed: u64) -> Result<BasisRealization> {
        sample_rows(&self.spec.basis, &self.grid, seed, &self.rows)
    }

    /// Stochastic terms ∫ f dZ per time and grid angle.
    pub fn stochastic_terms(&self, z: &BasisRealization) -> Vec<Vec<f64>> {
        let n = self.grid.n_angles;
        let dphi = self.grid.dphi();
        let mut prefix = None;
        self.kernels
            .iter()
            .map(|k| {
                let mut out = vec![0.0; n];
                match k {
                    TimeKernel::Lattice(pk) => {
                        let p = prefix.get_or_insert_with(|| {
                            let mut p = RowPrefixes::new(&self.grid, &self.rows);
                            p.fill(&z.increments);
                            p
                        });
                        pk.accumulate(p, &mut out);
                    }
                    TimeKernel::Points(field) => accumulate_points(field.as_ref(), &self.grid, z, dphi, &mut out),
                }
                out
            })
            .collect()
    }

    pub fn run(&self, seed: u64) -> Result<GrowthHistory> {
        let z = self.realize(seed)?;
        self.assemble(&z)
    }

    /// Radii from a given realization.
    pub fn assemble(&self, z: &BasisRealization) -> Result<GrowthHistory> {
        let xs = self.stochastic_terms(z);
        let mut radii = Vec::with_capacity(self.times.len());
        let mut non_positive = 0;
        for ((&t, x), mu) in self.times.iter().zip(&xs).zip(&self.drift) {
            let r: Vec<f64> = (0..x.len())
                .map(|j| {
                    let lin = mu[j] + x[j];
                    match self.spec.kind {
                        GrowthKind::RateLinear | GrowthKind::DirectRadial => lin,
                        GrowthKind::DirectScaled => self.multiplier[j] * lin,
                        GrowthKind::RateOfLog => self.spec.initial.eval(j) * lin.exp(),
                        GrowthKind::ExponentialTumour => lin.exp(),
                    }
                })
                .collect();
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue { t });
            }
            non_positive += r.iter().filter(|v| **v <= 0.0).count();
            radii.push(r);
        }
        if self.spec.monotone_by_construction() {
            let mut order: Vec<usize> = (0..self.times.len()).collect();
            order.sort_by(|a, b| self.times[*a].total_cmp(&self.times[*b]));
            for w in order.windows(2) {
                for j in 0..self.grid.n_angles {
                    if radii[w[1]][j] < radii[w[0]][j] - 1e-9 * (1.0 + radii[w[0]][j].abs()) {
                        return Err(Error::NonMonotoneRadius { angle_index: j });
                    }
                }
            }
        }
        Ok(GrowthHistory {
            times: self.times.clone(),
            angles: self.grid.angles(),
            radii,
            seed: z.seed,
            spec_hash: self.spec_hash,
            grid: self.grid.clone(),
            non_positive,
        })
    }
}

/// Atom-wise evaluation for Poisson bases: each atom adds the weight it
/// carries for every grid angle whose set covers it.
fn accumulate_points(field: &dyn WeightField, grid: &GridSpec, z: &BasisRealization, dphi: f64, out: &mut [f64]) {
    let Some(pts) = z.points.as_ref() else { return };
    let n = grid.n_angles as i64;
    let Ok(rows) = support_rows(field, grid, &z.basis.control) else { return };
    for r in rows {
        let (lo, hi) = grid.row_bounds(r);
        let reach = field.reach_on(lo, hi);
        for c in r * grid.n_angles..(r + 1) * grid.n_angles {
            for (th, s) in pts.cell(c) {
                let (first, count) = if reach >= PI - 1e-12 {
                    (0, n)
                } else {
                    let x = (th + PI) / dphi;
                    let a = (x - reach / dphi).floor() as i64 - 1;
                    let b = (x + reach / dphi).ceil() as i64 + 1;
                    (a, (b - a + 1).min(n))
                };
                for i in 0..count {
                    let j = (first + i).rem_euclid(n) as usize;
                    if let Some(w) = field.weight(wrap(th - j as f64 * dphi), s) {
                        out[j] += w;
                    }
                }
            }
        }
    }
}

/// Simulate `spec` on `grid` at `times` with one basis draw.
pub fn simulate(spec: &GrowthModelSpec, grid: &GridSpec, seed: u64, times: &[f64]) -> Result<GrowthHistory> {
    CompiledModel::new(spec, grid, times, Discretization::default())?.run(seed)
}
