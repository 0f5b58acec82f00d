use thiserror::Error;

#[derive(Debug, Error)]
pub enum QebError {
    #[error("qubit index {index} out of range for width {width}")]
    Index { index: usize, width: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("unsupported image shape: {0}")]
    Shape(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, QebError>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(QebError::Argument(msg.into()))
}
