use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("kumulant argument {theta} lies outside the Laplace domain of the {law} spot law")]
    KumulantDomain { law: &'static str, theta: f64 },
    #[error("region is unbounded in time")]
    UnboundedRegion,
    #[error("region reaches outside the grid window [{t_min}, {t_max}]")]
    RegionOutsideGrid { t_min: f64, t_max: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("radius decreases in time at angle index {angle_index}")]
    NonMonotoneRadius { angle_index: usize },
    #[error("non-finite radius at t = {t}")]
    NonFiniteValue { t: f64 },
    #[error("operation requires a {expected} basis")]
    WrongBasisKind { expected: &'static str },
    #[error("unknown preset `{0}`")]
    UnknownId(String),
    #[error("model assumption violated: {0}")]
    AssumptionViolation(String),
    #[error("negative target coefficient at order {k}: {value}")]
    NegativeTargetCoefficient { k: usize, value: f64 },
    #[error("order {k} aliases on a grid of {n} angles")]
    Alias { k: usize, n: usize },
    #[error("covariance matrix is singular or not positive definite")]
    SingularCovariance,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("optimizer did not converge after {evaluations} evaluations")]
    NonConvergence { evaluations: usize },
    #[error("infeasible bounds: {0}")]
    InfeasibleBounds(String),
    #[error("malformed input: {0}")]
    MalformedFile(String),
    #[error("angles are not a uniform grid: {0}")]
    NonUniformGrid(String),
    #[error("non-positive radius {value} at t = {t}")]
    NonPositiveRadius { t: f64, value: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
