use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Bad input data: malformed files, broken invariants, out-of-range
    /// arguments. Maps to exit code 2 in the CLI.
    #[error("validation error: {0}")]
    Validation(String),

    /// API misuse, e.g. stepping a terminal session.
    #[error("usage error: {0}")]
    Usage(String),

    /// Too many episodes ended in transport failure. Maps to exit code 3.
    #[error("transport-failure budget exceeded: {failures} episodes failed (budget {budget})")]
    TransportBudget { failures: u64, budget: u64 },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
