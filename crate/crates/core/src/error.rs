use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ratio must be finite and strictly positive, got {0}")]
    InvalidRatio(f64),

    #[error("exponential parameters must be finite and strictly positive, got ({0}, {1})")]
    InvalidParameter(f64, f64),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("sample {0} is empty")]
    EmptySample(usize),

    #[error("sample {sample} observation {index} is not a positive finite number: {value}")]
    NonPositiveObservation { sample: usize, index: usize, value: f64 },

    #[error("insufficient sample size: {0}")]
    InsufficientSampleSize(String),

    #[error("quadrature did not converge: estimated error {error:e} after {intervals} subintervals")]
    QuadratureNonConvergence { error: f64, intervals: usize },

    #[error("{0} did not converge")]
    NonConvergence(&'static str),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("simulation grid does not match the reference table: {0}")]
    GridMismatch(String),
}
