//! Growth models for star-shaped objects driven by a Lévy basis.

mod matching;
mod model;
mod outburst;
mod presets;
mod simulate;

pub use matching::{moment_match_gamma, moment_match_ig};
pub use model::{
    AngularMultiplier, DriftFunction, GrowthKind, GrowthModelSpec, InitialProfile, TumourParams, TumourRow,
};
pub use outburst::{poisson_outburst_view, OutburstView};
pub use presets::{
    direct_gamma, direct_ig, direct_measure, direct_radial, example_preset, preset_grid, DIRECT_MEANS,
    DIRECT_TIMES, DIRECT_VARIANCE, LAG_SLOPE, NARROW_HALF_WIDTH, PRESET_IDS, TUMOUR_ROWS, WIDE_HALF_WIDTH,
};
pub use simulate::{simulate, spec_hash, CompiledModel, GrowthHistory};
