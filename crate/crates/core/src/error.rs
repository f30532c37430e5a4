use thiserror::Error;

/// Errors raised by parameter validation, path construction and numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("stability index {0} out of range: need 0 < alpha <= 2 and alpha != 1")]
    IndexOutOfRange(f64),
    #[error("skew parameter {0} out of range [-1, 1]")]
    SkewOutOfRange(f64),
    #[error("scale must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid needs at least two points, got {0}")]
    DegenerateGrid(usize),
    #[error("query time {query} is beyond the simulated range (sup = {sup})")]
    QueryBeyondRange { query: f64, sup: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("real part of the Stone term is not positive ({0})")]
    DegenerateRe(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerical machinery rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_) | Error::DomainError(_) | Error::DegenerateRe(_)
        )
    }
}
