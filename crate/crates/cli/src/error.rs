use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] psroth::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("check suite failed: {0}")]
    ChecksFailed(String),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e.to_string()))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e.to_string()))
    }
}

impl CliError {
    /// 1 = config, 2 = resource (including IO), 3 = numerical.
    pub fn exit_code(&self) -> i32 {
        use psroth::Error as E;
        match self {
            CliError::Config(_) => 1,
            CliError::Core(E::Domain(_) | E::Argument(_) | E::Precondition(_)) => 1,
            CliError::Core(E::Resource(_) | E::Io(_)) | CliError::Io(_) => 2,
            CliError::Core(E::Numerical { .. }) | CliError::ChecksFailed(_) => 3,
        }
    }
}
