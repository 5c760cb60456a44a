use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates an invariant; the message names it.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A strategy returned a response outside its contract, or claimed a copy
    /// that does not verify.
    #[error("strategy contract violation at step {step}: {message}")]
    Contract { step: u64, message: String },
    /// The requested computation exceeds a configured resource cap.
    #[error("resource error: {0}")]
    Resource(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
