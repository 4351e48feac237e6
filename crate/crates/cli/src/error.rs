use std::io;
use std::path::PathBuf;

use thiserror::Error;
use uqscore_core::UqError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },

    #[error("line {line}, row {row}: {source}")]
    SimplexViolation {
        line: usize,
        row: usize,
        source: UqError,
    },

    #[error("line {line}: label {label} is outside 1..={classes}")]
    LabelOutOfRange {
        line: usize,
        label: usize,
        classes: usize,
    },

    #[error("record `{id}` on line {line} has no label")]
    MissingLabels { id: String, line: usize },

    #[error("{} contains no records", path.display())]
    EmptyInput { path: PathBuf },

    #[error(transparent)]
    Core(#[from] UqError),

    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },

    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    /// 0 success, 1 verification or output failure, 2 usage, 3 invalid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(UqError::BadConfig(_)) => 2,
            CliError::Io { .. }
            | CliError::Malformed { .. }
            | CliError::SimplexViolation { .. }
            | CliError::LabelOutOfRange { .. }
            | CliError::MissingLabels { .. }
            | CliError::EmptyInput { .. }
            | CliError::Core(_) => 3,
            CliError::Output { .. } | CliError::VerificationFailed(_) => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
