use proframe_core::Error;
use thiserror::Error;

/// Failures that abort a command before a report is written.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Engine(#[from] Error),
}

impl CliError {
    pub fn validation(path: impl Into<String>, message: impl ToString) -> Self {
        CliError::Validation { path: path.into(), message: message.to_string() }
    }

    /// `1` when the engine found the mathematics at fault, `2` when the
    /// input was.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(
                Error::NotAFrame { .. }
                | Error::VerificationFailure(_)
                | Error::NotInvertible { .. }
                | Error::NotPositiveInvertible(_),
            ) => 1,
            _ => 2,
        }
    }
}
