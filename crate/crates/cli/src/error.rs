use std::path::PathBuf;

use phaseless_core::error::ErrorKind;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] phaseless_core::Error),

    /// Flags that are individually valid but do not fit together.
    #[error("{0}")]
    Usage(String),

    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write `{}`: {source}", path.display())]
    Write {
        path: PathBuf,
        source: phaseless_core::Error,
    },

    #[error("cannot encode JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Numeric => 3,
                ErrorKind::Io => 4,
            },
            CliError::Usage(_) => 2,
            CliError::Read { .. } | CliError::Write { .. } | CliError::Json(_) => 4,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
