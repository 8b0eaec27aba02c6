use std::f64::consts::PI;

use super::model::GrowthModelSpec;
use crate::ambit::euclidean_embedding;
use crate::discretize::{support_rows, AmbitWeight};
use crate::error::{Error, Result};
use crate::levy::{sample_rows, BasisRealization, GridSpec};

/// Outbursts that arrived by time t, embedded in the plane, together with
/// the rate term Σ f̃_t over the outbursts in each direction's set.
#[derive(Clone, Debug)]
pub struct OutburstView {
    pub t: f64,
    /// Embedded points (s cos θ, s sin θ) with s ≤ t.
    pub points: Vec<(f64, f64)>,
    /// One rate term per grid angle.
    pub rates: Vec<f64>,
    pub realization: BasisRealization,
}

pub fn poisson_outburst_view(spec: &GrowthModelSpec, grid: &GridSpec, seed: u64, t: f64) -> Result<OutburstView> {
    if !spec.basis.spot.is_poisson() {
        return Err(Error::WrongBasisKind { expected: "Poisson" });
    }
    spec.validate(grid.n_angles)?;
    let reference = AmbitWeight { family: spec.ambit.clone(), weight: spec.weight.clone(), t, phi: -PI };
    let mut rows = vec![false; grid.n_rows()];
    for r in support_rows(&reference, grid, &spec.basis.control)? {
        rows[r] = true;
    }
    let z = sample_rows(&spec.basis, grid, seed, &rows)?;
    let store = z.points.as_ref().expect("Poisson draws carry their atoms");
    let atoms: Vec<(f64, f64)> = (0..store.offsets.len().saturating_sub(1))
        .flat_map(|c| store.cell(c))
        .filter(|&(_, s)| s <= t)
        .collect();
    let rates = grid
        .angles()
        .into_iter()
        .map(|phi| {
            atoms
                .iter()
                .filter(|&&(theta, s)| spec.ambit.contains(t, phi, theta, s))
                .map(|&(theta, s)| spec.weight.eval(t, theta, s, phi))
                .sum()
        })
        .collect();
    let points = atoms.iter().map(|&(th, s)| euclidean_embedding(th, s)).collect();
    Ok(OutburstView { t, points, rates, realization: z })
}
