use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fell outside the domain of the function it was passed to.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical routine failed (non-invertible matrix, non-finite result).
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
