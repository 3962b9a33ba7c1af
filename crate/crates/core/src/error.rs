use std::io;

use thiserror::Error;

/// Errors raised while reading corpora, configuring or running augmentation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid {what}: {message}")]
    Validation { what: String, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no augmentation possible: {0}")]
    NoAugmentation(String),

    #[error(
        "gave up after {attempts} draws without finding a donor; largest label keys: {largest}"
    )]
    ResampleExhausted { attempts: usize, largest: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(what: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            what: what.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
