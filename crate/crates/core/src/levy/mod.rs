//! Lévy bases on the cylinder: spot laws, control measures, lattice
//! sampling and integration of deterministic weights against a draw.

mod control;
mod grid;
mod integrate;
mod realization;
mod spot;

pub use control::ControlMeasure;
pub use grid::GridSpec;
pub use integrate::{integrate, measure_of, Region};
pub use realization::{sample_realization, sample_rows, BasisRealization, BasisSpec, PointStore};
pub use spot::{CellSampler, InverseGaussian, SpotLaw};
