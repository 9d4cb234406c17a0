use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a model or operation precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data cannot be used (empty path, malformed record, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A numerical routine left its range of validity.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
