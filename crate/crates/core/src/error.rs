//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SstError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("classification error: {0}")]
    Classification(String),
}

pub type Result<T> = std::result::Result<T, SstError>;

pub fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SstError::InvalidParameter(msg.into()))
}
