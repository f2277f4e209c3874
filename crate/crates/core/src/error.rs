use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A point or parameter lies outside the domain of a transform.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported format: {0}")]
    Unsupported(String),

    #[error("corrupt file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),

    #[error("no readable images in {0}")]
    EmptySource(PathBuf),

    #[error("schema violation: {0}")]
    Schema(String),

    /// Training or evaluation data contains only one class.
    #[error("single-class input: {0}")]
    SingleClass(String),

    #[error("no mated comparisons")]
    NoMated,

    #[error("missing quality for id {0:?}")]
    MissingQuality(String),

    #[error("degenerate crop: {0}")]
    DegenerateCrop(String),
}

/// Coarse error category, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Io,
    Domain,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn corrupt(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Corrupt {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(what: &'static str, input: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_) | Error::DegenerateCrop(_) => ErrorClass::Domain,
            Error::Io { .. }
            | Error::Corrupt { .. }
            | Error::Unsupported(_)
            | Error::EmptySource(_) => ErrorClass::Io,
            Error::InvalidModel(_)
            | Error::Parse { .. }
            | Error::DimensionMismatch(_)
            | Error::InvalidRecipe(_)
            | Error::Schema(_)
            | Error::SingleClass(_)
            | Error::NoMated
            | Error::MissingQuality(_) => ErrorClass::Usage,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
