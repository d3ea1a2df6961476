use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation: wrong
    /// dimensions, non-finite values, out-of-range indices.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bad request from a caller: unknown preset, missing parameter,
    /// malformed file.
    #[error("usage error: {0}")]
    Usage(String),

    /// A feedback block or storage matrix that violates its structural
    /// requirements.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The integrator produced a non-finite state.
    #[error("integration diverged after t = {last_good_time}")]
    Diverged { last_good_time: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Usage(format!("json: {e}"))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
