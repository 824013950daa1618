use thiserror::Error;

/// Configuration-stage failures. All of them map to exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("malformed scenario: {0}")]
    Parse(String),
    #[error("invalid scenario at `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("cannot write report to {path}: {reason}")]
    Write { path: String, reason: String },
    #[error("invalid arguments: {0}")]
    Arguments(String),
}

impl CliError {
    pub fn invalid(key: &str, err: impl std::fmt::Display) -> Self {
        CliError::Invalid {
            key: key.into(),
            message: err.to_string(),
        }
    }
}
