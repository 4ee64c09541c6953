//! Process-level error taxonomy. Three buckets, three exit codes: bad data
//! (2), bad configuration (3), well-formed but unsatisfiable request (4).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn data(message: impl Into<String>) -> Self {
        Self::Data(message.into())
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::Config(message.into())
    }

    pub fn infeasible(message: impl Into<String>) -> Self {
        Self::Infeasible(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Data(_) => 2,
            Self::Config(_) => 3,
            Self::Infeasible(_) => 4,
        }
    }
}
