//! Batch front end for the `praginfo` experiments: TOML scenarios in,
//! JSON reports and CSV series out.

pub mod commands;
pub mod config;
pub mod ingest;
pub mod report;

pub use commands::{execute, Invocation, Kind};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid scenario input. Exit code 1.
    #[error("config error: {0}")]
    Config(String),
    /// The experiment ran but failed numerically. Exit code 2.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl From<praginfo::Error> for CliError {
    fn from(e: praginfo::Error) -> Self {
        use praginfo::Error as E;
        match e {
            E::Numerical(_) | E::NonConvergence(_) | E::ZeroProbability { .. } | E::DegenerateModel(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}
