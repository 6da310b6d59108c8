use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Numerical(ncusp::Error),

    #[error("solver did not converge; artifacts written with converged = false")]
    NotConverged,
}

impl From<ncusp::Error> for CliError {
    fn from(e: ncusp::Error) -> Self {
        match e {
            ncusp::Error::RangeViolation { .. } | ncusp::Error::SimplexModeRequired => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NotConverged => 3,
            CliError::Io { .. } | CliError::Numerical(_) => 1,
        }
    }
}
