//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid model or training configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// API misuse: shape mismatches, out-of-range indices, empty inputs.
    #[error("usage error: {0}")]
    Usage(String),
    /// Malformed or inconsistent file content. `offset` is the byte position
    /// at which the problem was detected.
    #[error("format error at byte {offset}: {msg}")]
    Format { msg: String, offset: u64 },
    /// Non-finite values where finite arithmetic was required.
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
    pub fn format(msg: impl Into<String>, offset: u64) -> Self {
        Error::Format { msg: msg.into(), offset }
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
