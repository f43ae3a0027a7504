use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An iterative method failed to converge.
    #[error("numerical failure: {message} (last bracket [{lo}, {hi}])")]
    Numerical { message: String, lo: f64, hi: f64 },

    /// A table is too small, or a request exceeds the memory budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// Precondition failures of a bound experiment, one entry per failed hypothesis.
    #[error("precondition failed: {}", .0.join("; "))]
    Precondition(Vec<String>),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
