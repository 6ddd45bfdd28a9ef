use thiserror::Error;

/// Errors surfaced by the numeric kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request is valid but exceeds a configured resource cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// A configuration file failed to load or validate.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        CoreError::Domain(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        CoreError::Capacity(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CoreError::Config(msg.into())
    }
}
