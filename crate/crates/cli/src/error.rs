use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Solver(#[from] feast_gsvd::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("network error: {0}")]
    Network(String),

    #[error("size check failed: {0}")]
    ChecksumMismatch(String),
}

impl CliError {
    /// 1 for usage, parse, I/O and solver failures, 4 for network trouble,
    /// 5 for a download that does not match the expected sizes.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Network(_) => 4,
            CliError::ChecksumMismatch(_) => 5,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}
