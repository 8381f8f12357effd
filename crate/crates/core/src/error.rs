use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no items")]
    NoItems,
    #[error("oracle size limit: n = {n} exceeds {limit}")]
    OracleSizeLimit { n: usize, limit: usize },
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    EpsilonOutOfRange(String),
    #[error("approximate profit must be positive for profit scaling")]
    ZeroApproxProfit,
    #[error("chosen vector has length {got}, instance has {expected} items")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// An internal invariant was violated.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
