use std::io;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument `{name}`: {message}")]
    Argument { name: &'static str, message: String },

    #[error("invalid pattern: {0}")]
    Validation(String),

    #[error("size guard: {0}")]
    Size(String),

    #[error("count overflow: {0}")]
    Overflow(String),

    #[error("privacy budget exceeded at node {node}, round {round}: spent {spent} > budget {budget}")]
    PrivacyViolation {
        node: usize,
        round: u32,
        spent: f64,
        budget: f64,
    },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(name: &'static str, message: impl Into<String>) -> Self {
        Error::Argument {
            name,
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Size(_) | Error::Overflow(_) => 3,
            Error::Io(_) | Error::Csv(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
