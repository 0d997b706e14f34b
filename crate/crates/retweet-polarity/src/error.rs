//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing input file: {0}")]
    MissingInput(PathBuf),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown user `{0}`")]
    UnknownUser(String),

    #[error("unknown model `{0}` (expected one of {1})")]
    UnknownModel(String, &'static str),

    #[error("training set contains a single class; need at least one seed per class")]
    SingleClass,

    #[error("class {class} has {size} members, fewer than k={k} folds")]
    ClassTooSmall { class: String, size: usize, k: usize },

    #[error("non-finite value in {context}; learning rate may be too high")]
    NonFinite { context: String },

    #[error("{0} scores cannot be partitioned at q={1}: extremes would be empty")]
    PartitionTooSmall(usize, f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
