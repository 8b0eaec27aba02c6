//! Empirical moments, method-of-moments and likelihood fitting, and
//! profile ingestion.

mod dataset;
mod empirical;
mod fit;
mod mle;
mod optimize;

pub use dataset::{ingest_profiles, ProfileDataset};
pub use empirical::{empirical_moments, empirical_moments_with, lag_ladder, EmpiricalMoments, DEFAULT_LADDER_LEN};
pub use fit::{
    family_moments, fit_moments, fit_moments_to, moment_objective, DirectRadialFamily, FitReport, FreeParameter,
    MomentFamily, TumourFamily,
};
pub use mle::{family_loglik, fit_fourier_mle, replicate_series, ScaledTau, SeparableTau, TauFamily};
pub use optimize::{check_bounds, minimize_bounded, SearchOptions, SearchResult};
