use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{field}`: {reason}")]
    Argument { field: &'static str, reason: String },

    #[error("non-finite value in {what} at node {node}")]
    Data { what: String, node: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("blow-up detected at step {step}")]
    BlowUp { step: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Argument { field, reason: reason.into() }
    }
}
