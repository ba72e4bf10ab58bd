use thiserror::Error;

/// Errors raised by the numeric kernels, the identity registry and the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    /// An input lies outside the domain of the operation (pole, z = 0, |x| >= 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An intermediate or final value left the finite floating-point range.
    #[error("numeric overflow: {0}")]
    Overflow(String),

    /// A context or policy was constructed with invalid settings.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// No identity with the requested id exists.
    #[error("unknown identity: {0}")]
    UnknownIdentity(String),
}

impl QError {
    pub fn domain(msg: impl Into<String>) -> Self {
        QError::Domain(msg.into())
    }

    pub fn overflow(msg: impl Into<String>) -> Self {
        QError::Overflow(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        QError::Config(msg.into())
    }

    /// Short machine-readable tag used in JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            QError::Domain(_) => "domain",
            QError::Overflow(_) => "overflow",
            QError::Config(_) => "config",
            QError::UnknownIdentity(_) => "unknown-identity",
        }
    }
}

pub type Result<T> = std::result::Result<T, QError>;
