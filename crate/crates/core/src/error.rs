use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient points for LOO query: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {index} is outside the domain or not finite")]
    PointOutsideDomain { index: usize },

    #[error("invalid sampling measure: {0}")]
    InvalidMeasure(String),

    #[error("non-finite density evaluation at point {index}")]
    NonFiniteDensity { index: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at position {index}")]
    NonFiniteValue { index: usize },

    #[error("empty input")]
    Empty,

    #[error("trapezoid requires univariate domain")]
    TrapezoidDimension,

    #[error(
        "leave-one-out cumulative volumes in dimension {dim} need the expensive-LOO flag; \
         use control_weights_nn instead"
    )]
    ExpensiveLooRequired { dim: usize },

    #[error("unbiased weights need M >= 4 in strict mode, got {0}")]
    StrictSampleSize(usize),

    #[error("invalid subsample configuration: {0}")]
    InvalidSubsample(String),

    #[error("probability out of range: {0}")]
    InvalidProbability(f64),

    #[error("noise scale missing: confidence intervals need per-point noise scales")]
    MissingNoiseScale,

    #[error("limit-1d variance requires a univariate cube domain")]
    LimitModeDimension,

    #[error("regularity estimation failed: empty windows at t = {0:?}")]
    EmptyWindows(Vec<f64>),

    #[error("density floor violated at point {index}: f_T = {value}")]
    DensityFloor { index: usize, value: f64 },

    #[error("need n >= 2 for variance")]
    TooFewCurves,

    #[error("pooled design too small: need at least {needed} points, got {got}")]
    PooledTooSmall { needed: usize, got: usize },

    #[error("covariate dimension K = {0} not supported here (K = 1 required)")]
    CovariateDimension(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid tabulated function: {0}")]
    InvalidTable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
