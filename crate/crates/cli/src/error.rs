use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Configuration, argument or I/O problems — exit code 1.
    #[error("{0}")]
    Config(String),

    /// Numerical failure of a run — exit code 2.
    #[error("{0}")]
    Numerical(String),
}

impl From<roughpath_core::Error> for CliError {
    fn from(e: roughpath_core::Error) -> Self {
        match e {
            roughpath_core::Error::Divergence { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
