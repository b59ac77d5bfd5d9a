//! Command-line front end for dunklkit: configuration, builtin inputs,
//! CSV/JSON emission and the acceptance runner.

pub mod builtins;
pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 2 for misuse, 3 for numerical failure. Verification failures (1) are
    /// reported through the command outcome, not as errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<dunklkit::Error> for CliError {
    fn from(e: dunklkit::Error) -> Self {
        use dunklkit::Error as E;
        match e {
            E::Domain(_) | E::InvalidInterval { .. } | E::InvalidAtom(_) | E::Parse(_) => CliError::Config(e.to_string()),
            E::Io(m) => CliError::Io(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}
