use std::fmt;

use thiserror::Error;

/// Which desk-scale limit was exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapKind {
    Atoms,
    Constraints,
    Situation,
    FlatSet,
    Arguments,
}

impl fmt::Display for CapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapKind::Atoms => "atom",
            CapKind::Constraints => "soft constraint",
            CapKind::Situation => "situation",
            CapKind::FlatSet => "flat constraint/situation set",
            CapKind::Arguments => "argument",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    NormFile {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{kind} cap exceeded: {actual} > {limit}")]
    CapExceeded {
        kind: CapKind,
        limit: usize,
        actual: usize,
    },

    #[error("invalid case: {0}")]
    InvalidCase(String),

    #[error("argument {0} is not in the grounded extension")]
    NotInExtension(String),

    #[error("consequence is neither obligatory nor forbidden; rerun in diagnostic mode to see rival explanations")]
    NoVerdict,

    #[error("explanation existence violated: {0}")]
    ExistenceViolation(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn cap(kind: CapKind, limit: usize, actual: usize) -> Self {
        Error::CapExceeded {
            kind,
            limit,
            actual,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. } | Error::NormFile { .. } | Error::Json(_) => 2,
            Error::InvalidCase(_) => 3,
            Error::CapExceeded { .. } => 4,
            Error::Io(_) | Error::Usage(_) => 1,
            Error::NotInExtension(_)
            | Error::NoVerdict
            | Error::ExistenceViolation(_)
            | Error::Internal(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
