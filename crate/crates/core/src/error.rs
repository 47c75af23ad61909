use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document or data file.
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    /// Well-formed input that violates a model invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Argument outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Coincident points where a Green's function is singular.
    #[error("singularity: {0}")]
    Singular(String),

    /// Division by a zero illumination or a vanishing direct arrival.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// A time grid too coarse for the band it must represent.
    #[error("aliasing: {0}")]
    Aliasing(String),

    /// Two inputs that should describe the same grid do not.
    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used by the command line for exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numeric,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::Validation(_) | Error::Mismatch(_) => ErrorKind::Validation,
            Error::Domain(_) | Error::Singular(_) | Error::DivisionByZero(_) | Error::Aliasing(_) => ErrorKind::Numeric,
            Error::Io(_) => ErrorKind::Io,
        }
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
