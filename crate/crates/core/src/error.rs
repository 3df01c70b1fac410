use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs have inconsistent shapes or break a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// The data cannot support the statistic (zero variance, singular covariance).
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    /// A model parameterization is not a valid covariance model.
    #[error("invalid model: {0}")]
    Validity(String),
    /// An iterative numerical method failed.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// An experiment or run configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Malformed input file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
