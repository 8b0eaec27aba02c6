//! Turning a weight field on the cylinder into per-cell weights.
//!
//! Cells fully inside the support take the weight at the cell centre.
//! Partial cells are resolved on an r × r sub-lattice: Gaussian bases get
//! the μ-weighted inside fraction times the mean inside weight; jump bases
//! keep the whole mean inside weight if at least half the cell is inside
//! and drop the cell otherwise, so every atom stays whole.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ambit::{cyc_dist, wrap, AmbitFamily};
use crate::error::{Error, Result};
use crate::levy::{BasisRealization, BasisSpec, ControlMeasure, GridSpec};
use crate::weight::WeightFunction;

/// A bounded-support weight on the cylinder.
pub trait WeightField: Sync {
    /// Weight at (θ, s), None outside the support.
    fn weight(&self, theta: f64, s: f64) -> Option<f64>;
    /// Closed time interval containing the support.
    fn time_support(&self) -> (f64, f64);
    fn center(&self) -> f64;
    /// Upper bound on the angular half-width of the support over [lo, hi].
    fn reach_on(&self, lo: f64, hi: f64) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    /// Sub-lattice size per axis for partial cells; 1 uses cell centres only.
    pub refine: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization { refine: 4 }
    }
}

/// f_t(·; φ) restricted to A_t(φ).
#[derive(Clone, Debug)]
pub struct AmbitWeight {
    pub family: AmbitFamily,
    pub weight: WeightFunction,
    pub t: f64,
    pub phi: f64,
}

impl WeightField for AmbitWeight {
    #[inline]
    fn weight(&self, theta: f64, s: f64) -> Option<f64> {
        self.family
            .contains(self.t, self.phi, theta, s)
            .then(|| self.weight.eval(self.t, theta, s, self.phi))
    }

    fn time_support(&self) -> (f64, f64) {
        self.family.window(self.t)
    }

    fn center(&self) -> f64 {
        self.phi
    }

    fn reach_on(&self, lo: f64, hi: f64) -> f64 {
        self.family.max_halfwidth_on(self.t, lo, hi)
    }
}

/// Weight of one lattice cell under the rule in the module docs.
pub fn cell_weight(
    field: &dyn WeightField,
    grid: &GridSpec,
    control: &ControlMeasure,
    row: usize,
    col: usize,
    jump: bool,
    disc: Discretization,
) -> f64 {
    let (s_lo, s_hi) = grid.row_bounds(row);
    let dphi = grid.dphi();
    let th_lo = grid.angle(col);
    let mid = field.weight(th_lo + 0.5 * dphi, 0.5 * (s_lo + s_hi));
    let r = disc.refine.max(1);
    if r == 1 {
        return mid.unwrap_or(0.0);
    }
    let (mut w_tot, mut w_in, mut sum, mut all_in) = (0.0, 0.0, 0.0, true);
    for b in 0..r {
        let s = s_lo + (b as f64 + 0.5) * (s_hi - s_lo) / r as f64;
        let g = control.density(s);
        for a in 0..r {
            let th = th_lo + (a as f64 + 0.5) * dphi / r as f64;
            w_tot += g;
            match field.weight(th, s) {
                Some(v) => {
                    w_in += g;
                    sum += g * v;
                }
                None => all_in = false,
            }
        }
    }
    if all_in {
        return mid.unwrap_or(if w_in > 0.0 { sum / w_in } else { 0.0 });
    }
    if !(w_in > 0.0) {
        return 0.0;
    }
    let frac = w_in / w_tot;
    let mean = sum / w_in;
    if !jump {
        frac * mean
    } else if frac >= 0.5 {
        mean
    } else {
        0.0
    }
}

/// Grid rows the field's support meets, after checking that the support
/// does not leave the grid where μ puts mass.
pub fn support_rows(field: &dyn WeightField, grid: &GridSpec, control: &ControlMeasure) -> Result<std::ops::Range<usize>> {
    let (lo, hi) = field.time_support();
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::UnboundedRegion);
    }
    let eps = 1e-9 * grid.dt;
    let outside = (lo < grid.t_min - eps && control.mass(lo, grid.t_min) > 0.0)
        || (hi > grid.t_max + eps && control.mass(grid.t_max, hi) > 0.0);
    if outside {
        return Err(Error::RegionOutsideGrid { t_min: grid.t_min, t_max: grid.t_max });
    }
    Ok(grid.rows_meeting(lo, hi))
}

/// Angular cells of one row that the support can touch.
pub fn candidate_cols(field: &dyn WeightField, grid: &GridSpec, row: usize) -> Vec<usize> {
    let n = grid.n_angles;
    let (lo, hi) = grid.row_bounds(row);
    let (slo, shi) = field.time_support();
    let reach = field.reach_on(lo.max(slo), hi.min(shi));
    if reach >= PI - 1e-12 {
        return (0..n).collect();
    }
    let dphi = grid.dphi();
    let c = field.center();
    let first = ((c - reach + PI) / dphi).floor() as i64 - 1;
    let last = ((c + reach + PI) / dphi).floor() as i64 + 1;
    let count = ((last - first + 1) as usize).min(n);
    (0..count).map(|i| (first + i as i64).rem_euclid(n as i64) as usize).collect()
}

/// Cell weights of one field: the lattice approximation of ∫ f dZ.
#[derive(Clone, Debug, Default)]
pub struct PointKernel {
    pub entries: Vec<(usize, f64)>,
}

impl PointKernel {
    pub fn build(field: &dyn WeightField, grid: &GridSpec, basis: &BasisSpec, disc: Discretization) -> Result<Self> {
        let rows = support_rows(field, grid, &basis.control)?;
        let jump = !basis.spot.is_gaussian();
        let mut entries = Vec::new();
        for r in rows {
            for j in candidate_cols(field, grid, r) {
                let w = cell_weight(field, grid, &basis.control, r, j, jump, disc);
                if w != 0.0 {
                    entries.push((grid.cell(r, j), w));
                }
            }
        }
        Ok(PointKernel { entries })
    }

    pub fn apply(&self, increments: &[f64]) -> f64 {
        self.entries.iter().map(|&(c, w)| w * increments[c]).sum()
    }
}

/// ∫ f dZ on a Poisson draw: the sum of f over the atoms in the support.
pub fn integrate_points(field: &dyn WeightField, z: &BasisRealization) -> Result<f64> {
    let pts = z.points.as_ref().ok_or(Error::WrongBasisKind { expected: "Poisson" })?;
    let rows = support_rows(field, &z.grid, &z.basis.control)?;
    let mut total = 0.0;
    for r in rows {
        for j in candidate_cols(field, &z.grid, r) {
            for (th, s) in pts.cell(z.grid.cell(r, j)) {
                if let Some(v) = field.weight(th, s) {
                    total += v;
                }
            }
        }
    }
    Ok(total)
}

/// ∫ f dZ on a draw, by cell weights or, for Poisson bases, by atoms.
pub fn integrate_field(field: &dyn WeightField, z: &BasisRealization, disc: Discretization) -> Result<f64> {
    if z.basis.spot.is_poisson() {
        integrate_points(field, z)
    } else {
        Ok(PointKernel::build(field, &z.grid, &z.basis, disc)?.apply(&z.increments))
    }
}

#[derive(Clone, Debug)]
struct Run {
    start: i64,
    len: usize,
    w: f64,
}

#[derive(Clone, Debug)]
struct KernelRow {
    row: usize,
    runs: Vec<Run>,
}

/// Cell weights of a translation-covariant field for every grid angle at
/// once. Weights are stored for the reference angle −π as runs of equal
/// weight; angle j reads the same runs shifted by j cells.
#[derive(Clone, Debug, Default)]
pub struct ProfileKernel {
    rows: Vec<KernelRow>,
}

impl ProfileKernel {
    /// `field` must be centred at −π.
    pub fn build(field: &dyn WeightField, grid: &GridSpec, basis: &BasisSpec, disc: Discretization) -> Result<Self> {
        debug_assert!(cyc_dist(field.center(), -PI) < 1e-12);
        let n = grid.n_angles as i64;
        let jump = !basis.spot.is_gaussian();
        let mut rows = Vec::new();
        for r in support_rows(field, grid, &basis.control)? {
            let mut cells: Vec<(i64, f64)> = candidate_cols(field, grid, r)
                .into_iter()
                .filter_map(|j| {
                    let w = cell_weight(field, grid, &basis.control, r, j, jump, disc);
                    let off = if (j as i64) * 2 >= n { j as i64 - n } else { j as i64 };
                    (w != 0.0).then_some((off, w))
                })
                .collect();
            if cells.is_empty() {
                continue;
            }
            cells.sort_by_key(|c| c.0);
            let mut runs: Vec<Run> = Vec::new();
            for (off, w) in cells {
                match runs.last_mut() {
                    Some(run) if run.start + run.len as i64 == off && run.w == w => run.len += 1,
                    _ => runs.push(Run { start: off, len: 1, w }),
                }
            }
            rows.push(KernelRow { row: r, runs });
        }
        Ok(ProfileKernel { rows })
    }

    pub fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.row)
    }

    /// Add Σ_c w_c Z(c + j) to `out[j]` for every angle j.
    pub fn accumulate(&self, prefix: &RowPrefixes, out: &mut [f64]) {
        let n = out.len() as i64;
        for kr in &self.rows {
            let p = prefix.row(kr.row);
            for run in &kr.runs {
                let base = run.start + n;
                let len = run.len as i64;
                for (j, o) in out.iter_mut().enumerate() {
                    let a = (base + j as i64) as usize;
                    *o += run.w * (p[a + len as usize] - p[a]);
                }
            }
        }
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.rows.iter().flat_map(|r| r.runs.iter()).map(|r| r.w.abs()).fold(0.0, f64::max)
    }

    pub fn max_weight(&self) -> f64 {
        self.rows.iter().flat_map(|r| r.runs.iter()).map(|r| r.w).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Prefix sums of each grid row laid out three times end to end, so any
/// cyclic window is a difference of two entries.
#[derive(Clone, Debug)]
pub struct RowPrefixes {
    n: usize,
    index: Vec<Option<usize>>,
    data: Vec<f64>,
}

impl RowPrefixes {
    pub fn new(grid: &GridSpec, rows: &[bool]) -> Self {
        let n = grid.n_angles;
        let mut index = vec![None; grid.n_rows()];
        let mut k = 0;
        for (r, &used) in rows.iter().enumerate() {
            if used {
                index[r] = Some(k);
                k += 1;
            }
        }
        RowPrefixes { n, index, data: vec![0.0; k * (3 * n + 1)] }
    }

    pub fn fill(&mut self, increments: &[f64]) {
        let n = self.n;
        let w = 3 * n + 1;
        for (r, slot) in self.index.iter().enumerate() {
            if let Some(k) = slot {
                let row = &increments[r * n..(r + 1) * n];
                let p = &mut self.data[k * w..(k + 1) * w];
                p[0] = 0.0;
                let mut acc = 0.0;
                for i in 0..3 * n {
                    acc += row[i % n];
                    p[i + 1] = acc;
                }
            }
        }
    }

    fn row(&self, r: usize) -> &[f64] {
        let k = self.index[r].expect("row was registered");
        let w = 3 * self.n + 1;
        &self.data[k * w..(k + 1) * w]
    }
}

/// Shift a field centred at −π to angle φ_j: θ ↦ θ − jΔφ.
#[inline]
pub fn shifted_angle(theta: f64, j: usize, dphi: f64) -> f64 {
    wrap(theta - j as f64 * dphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{sample_realization, SpotLaw};
    use crate::schedule::Schedule;

    fn rect(theta: f64, lag: f64) -> AmbitFamily {
        AmbitFamily::Rectangular { half_width: Schedule::constant(theta), lag: Schedule::constant(lag) }
    }

    #[test]
    fn aligned_rectangle_weights_are_exact() {
        let grid = GridSpec::new(64, 1.0, 0.0, 10.0).unwrap();
        let basis = BasisSpec::new(SpotLaw::Gaussian { drift: 0.0, variance: 1.0 }, ControlMeasure::lebesgue());
        let field = AmbitWeight { family: rect(PI / 8.0, 3.0), weight: WeightFunction::constant(1.0), t: 7.0, phi: grid.angle(10) };
        let k = PointKernel::build(&field, &grid, &basis, Discretization::default()).unwrap();
        assert_eq!(k.entries.len(), 3 * 8);
        assert!(k.entries.iter().all(|&(_, w)| w == 1.0));
    }

    #[test]
    fn profile_kernel_matches_point_kernels() {
        let grid = GridSpec::new(40, 0.5, 0.0, 6.0).unwrap();
        let basis = BasisSpec::new(SpotLaw::Gaussian { drift: 0.1, variance: 1.0 }, ControlMeasure::Linear { a: 2.0 });
        let z = sample_realization(&basis, &grid, 3).unwrap();
        let weight = WeightFunction::Tumour {
            alpha: Schedule::constant(0.5),
            beta: Schedule::constant(-0.2),
            band: Schedule::constant(1.3),
        };
        let fam = AmbitFamily::Tumour { lag: Schedule::constant(4.0), band: Schedule::constant(1.3), phi0: Schedule::constant(0.9) };
        let disc = Discretization::default();
        let reference = AmbitWeight { family: fam.clone(), weight: weight.clone(), t: 5.5, phi: -PI };
        let pk = ProfileKernel::build(&reference, &grid, &basis, disc).unwrap();
        let mut used = vec![false; grid.n_rows()];
        for r in pk.rows() {
            used[r] = true;
        }
        let mut pre = RowPrefixes::new(&grid, &used);
        pre.fill(&z.increments);
        let mut out = vec![0.0; grid.n_angles];
        pk.accumulate(&pre, &mut out);
        for j in [0, 1, 7, 20, 39] {
            let f = AmbitWeight { family: fam.clone(), weight: weight.clone(), t: 5.5, phi: grid.angle(j) };
            let direct = PointKernel::build(&f, &grid, &basis, disc).unwrap().apply(&z.increments);
            assert!((direct - out[j]).abs() < 1e-10, "angle {j}: {direct} vs {}", out[j]);
        }
    }

    #[test]
    fn support_outside_grid_is_rejected() {
        let grid = GridSpec::new(8, 1.0, 5.0, 10.0).unwrap();
        let basis = BasisSpec::new(SpotLaw::Poisson, ControlMeasure::lebesgue());
        let field = AmbitWeight { family: rect(0.5, 3.0), weight: WeightFunction::constant(1.0), t: 6.0, phi: 0.0 };
        assert!(matches!(
            PointKernel::build(&field, &grid, &basis, Discretization::default()),
            Err(Error::RegionOutsideGrid { .. })
        ));
    }
}
