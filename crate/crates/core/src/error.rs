use thiserror::Error;

/// Errors raised by the library. Every public fallible function returns this.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaiError {
    #[error("family mismatch: {0} vs {1}")]
    FamilyMismatch(String, String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, BaiError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(BaiError::Domain(msg.into()))
}
