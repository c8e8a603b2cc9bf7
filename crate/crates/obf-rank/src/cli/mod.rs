//! Command-line front end: JSON scenario configs in, tables and CSV out.
//!
//! Exit-code contract: 0 success, 1 input error, 2 infeasible/empty region,
//! 3 Monte-Carlo validation failure.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    ValidationFailure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::ValidationFailure(_) => 3,
        }
    }
}
