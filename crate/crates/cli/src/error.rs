use dho_core::parser::ParseError;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("regime: {0}")]
    Regime(String),
    #[error("parse: {0}")]
    Parse(#[from] ParseError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// `1` for a computation that ran and failed, `2` for everything that
    /// prevented it from running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 1,
            _ => 2,
        }
    }
}
