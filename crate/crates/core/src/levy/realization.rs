use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ControlMeasure, GridSpec, SpotLaw};
use crate::error::Result;
use crate::rng;

/// A homogeneous factorizable Lévy basis on the cylinder [−π, π) × ℝ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub spot: SpotLaw,
    #[serde(default)]
    pub control: ControlMeasure,
}

impl BasisSpec {
    pub fn new(spot: SpotLaw, control: ControlMeasure) -> Self {
        BasisSpec { spot, control }
    }

    pub fn validate(&self) -> Result<()> {
        self.spot.validate()?;
        self.control.validate()
    }

    /// Measure of one cell in each grid row.
    pub fn row_measures(&self, grid: &GridSpec) -> Vec<f64> {
        let dphi = grid.dphi();
        (0..grid.n_rows())
            .map(|r| {
                let (lo, hi) = grid.row_bounds(r);
                dphi * self.control.mass(lo, hi)
            })
            .collect()
    }
}

/// Atoms of a Poisson basis, grouped by cell.
#[derive(Clone, Debug, Default)]
pub struct PointStore {
    /// `offsets[c]..offsets[c+1]` indexes the points of cell c.
    pub offsets: Vec<usize>,
    pub theta: Vec<f64>,
    pub s: Vec<f64>,
}

impl PointStore {
    pub fn cell(&self, c: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let r = self.offsets[c]..self.offsets[c + 1];
        self.theta[r.clone()].iter().copied().zip(self.s[r].iter().copied())
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// One draw of the basis on a grid: per-cell increments Z(cell) and, for
/// Poisson bases, the atoms themselves.
#[derive(Clone, Debug)]
pub struct BasisRealization {
    pub grid: GridSpec,
    pub basis: BasisSpec,
    pub seed: u64,
    pub increments: Vec<f64>,
    pub points: Option<PointStore>,
    pub row_measures: Vec<f64>,
}

impl BasisRealization {
    pub fn increment(&self, r: usize, j: usize) -> f64 {
        self.increments[self.grid.cell(r, j)]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let n = self.grid.n_angles;
        &self.increments[r * n..(r + 1) * n]
    }
}

/// Sample every cell of the grid. Row r draws from its own stream
/// `mix(seed, r)`, so any subset of rows can be re-drawn identically.
pub fn sample_realization(basis: &BasisSpec, grid: &GridSpec, seed: u64) -> Result<BasisRealization> {
    let rows = vec![true; grid.n_rows()];
    sample_rows(basis, grid, seed, &rows)
}

/// Sample only the rows flagged in `rows`; the others stay zero.
pub fn sample_rows(basis: &BasisSpec, grid: &GridSpec, seed: u64, rows: &[bool]) -> Result<BasisRealization> {
    basis.validate()?;
    grid.validate()?;
    let n = grid.n_angles;
    let n_rows = grid.n_rows();
    let row_measures = basis.row_measures(grid);
    let mut increments = vec![0.0; n_rows * n];
    let poisson = basis.spot.is_poisson();
    let mut store = PointStore { offsets: Vec::with_capacity(n_rows * n + 1), ..Default::default() };
    store.offsets.push(0);
    let dphi = grid.dphi();
    for r in 0..n_rows {
        if !rows.get(r).copied().unwrap_or(false) {
            if poisson {
                store.offsets.extend(std::iter::repeat_n(store.theta.len(), n));
            }
            continue;
        }
        let mut rng = rng::stream(seed, r as u64);
        let sampler = basis.spot.cell_sampler(row_measures[r]);
        let (lo, hi) = grid.row_bounds(r);
        let gmax = basis.control.max_on(lo, hi);
        let flat = basis.control.is_constant();
        for j in 0..n {
            let z = sampler.sample(&mut rng);
            increments[r * n + j] = z;
            if poisson {
                let left = grid.angle(j);
                for _ in 0..z as usize {
                    let theta = left + dphi * rng.random::<f64>();
                    let s = loop {
                        let s = lo + (hi - lo) * rng.random::<f64>();
                        if flat || rng.random::<f64>() * gmax <= basis.control.density(s) {
                            break s;
                        }
                    };
                    store.theta.push(theta);
                    store.s.push(s);
                }
                store.offsets.push(store.theta.len());
            }
        }
    }
    Ok(BasisRealization {
        grid: grid.clone(),
        basis: basis.clone(),
        seed,
        increments,
        points: poisson.then_some(store),
        row_measures,
    })
}
