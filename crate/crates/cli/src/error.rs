use std::fmt;

use hiercon_core::Error as CoreError;

/// Failure of a CLI run, carrying the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration.
    Config(String),
    /// The solver found no admissible or feasible contract.
    Infeasible(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible instance: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. } | CoreError::Domain(_) => CliError::Config(e.to_string()),
            CoreError::Inadmissible { .. } | CoreError::Infeasible(_) => CliError::Infeasible(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
