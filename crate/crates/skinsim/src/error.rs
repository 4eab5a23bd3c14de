use thiserror::Error;

/// Errors surfaced by the simulator and analysis operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value is outside the operation's domain (negative pressure,
    /// non-finite sample, zero area, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Caller broke a structural contract (length mismatch, empty dataset, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A measurement procedure could not produce a result from the given trace.
    #[error("measurement failed: {0}")]
    Measurement(String),

    /// The request is valid but outside what this implementation supports.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Catalog, layout or model (de)serialization failed.
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn measurement(msg: impl Into<String>) -> Self {
        Error::Measurement(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
