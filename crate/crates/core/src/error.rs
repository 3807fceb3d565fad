use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid puncturing pattern: {0}")]
    InvalidPattern(String),

    /// Adaptive quadrature could not meet its absolute tolerance.
    #[error("quadrature error estimate {achieved:e} exceeds tolerance {requested:e}")]
    Accuracy { requested: f64, achieved: f64 },

    /// The certified series tail is still wider than requested.
    #[error(
        "series tail {achieved:e} exceeds tolerance {requested:e} after {terms} moment evaluations"
    )]
    Truncation {
        requested: f64,
        achieved: f64,
        terms: u64,
    },

    #[error("no threshold: {0}")]
    NoThreshold(String),

    #[error("bound is not monotone in the channel parameter: {0}")]
    Monotonicity(String),

    #[error("no average check degree up to {limit} satisfies the rate requirement")]
    UnboundedRequirement { limit: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
