use spectral_lab::{ActionError, LinalgError, ModelError, TripleError};
use thiserror::Error;

/// Failure of a scenario run, split by the exit code it maps to.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    /// The configuration could not be read or parsed.
    #[error("config error: {0}")]
    ConfigParse(String),
    /// The configuration parsed but describes an invalid scenario.
    #[error("validation error: {0}")]
    Validation(String),
    /// A numerical routine failed on valid input.
    #[error("compute error: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigParse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Compute(_) => 4,
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NoConvergence => CliError::Compute(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<TripleError> for CliError {
    fn from(e: TripleError) -> Self {
        match e {
            TripleError::Linalg(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ActionError> for CliError {
    fn from(e: ActionError) -> Self {
        match e {
            ActionError::Linalg(inner) => inner.into(),
            ActionError::NonRealExpectation(_) => CliError::Compute(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Triple(inner) => inner.into(),
            ModelError::Linalg(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}
