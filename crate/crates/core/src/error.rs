use thiserror::Error;

/// Crate-wide error type. The CLI maps `Usage` to exit code 1 and verification
/// failures (which are reports, not errors) to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("range: {0}")]
    Range(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
