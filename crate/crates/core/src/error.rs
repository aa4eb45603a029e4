use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("unknown cleaner {0:?}")]
    UnknownCleaner(String),

    /// A text format violated its grammar. `line` is 1-based.
    #[error("{}: line {line}: {message}", path.display())]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate id {id} (line {line})")]
    DuplicateId { id: String, line: usize },

    /// Bracketed tree notation error; `offset` is a character offset into the input.
    #[error("{message} at offset {offset}")]
    Tree { offset: usize, message: String },

    /// Binary embedding payload error.
    #[error("{}: {message}", path.display())]
    Binary { path: PathBuf, message: String },

    #[error("degenerate embedding matrix")]
    DegenerateEmbedding,

    #[error("invalid input: {0}")]
    Invalid(String),

    // the io error is part of the message, not a separate source, so chained
    // printing does not repeat it
    #[error("{}: {cause}", path.display())]
    Io { path: PathBuf, cause: std::io::Error },
}

impl Error {
    pub(crate) fn syntax(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn binary(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Binary {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            cause: source,
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}
