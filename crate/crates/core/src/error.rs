use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("direction is not a unit vector (norm {norm})")]
    InvalidDirection { norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("operator is not a valid {kind}: {reason}")]
    InvalidOperator { kind: &'static str, reason: String },
    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("n = {n} exceeds the configured limit of {limit} events")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("distribution puts mass on incompatible context {context}")]
    IncompatibleSupport { context: String },
    #[error("context {context} contains non-commuting measurements")]
    IncompatibleContext { context: String },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid suite: {0}")]
    InvalidSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
