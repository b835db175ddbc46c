//! Command-line front end for `keyrel-core`.
//!
//! Every command returns a [`Response`] holding the text for stdout and the
//! process exit code, so the binary is a thin wrapper and tests can drive
//! commands in-process.

pub mod args;
mod commands;
mod enumerate;
pub mod report;

use keyrel_core::Error as CoreError;
use thiserror::Error;

pub use args::{Cli, Command};
pub use enumerate::{enumerate, EnumFilter};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_GUARD: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::Parse { .. }) => EXIT_PARSE,
            CliError::Core(CoreError::Guard(_)) => EXIT_GUARD,
            CliError::Core(CoreError::BudgetExceeded(_)) => EXIT_BUDGET,
            CliError::Core(_) | CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
        }
    }
}

/// Output of one command. A budget-limited command may still carry a
/// partial report together with [`EXIT_BUDGET`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub stdout: String,
    pub code: u8,
}

impl Response {
    fn ok(stdout: String) -> Self {
        Response { stdout, code: EXIT_OK }
    }
}

pub fn run(cli: &Cli) -> Result<Response, CliError> {
    commands::dispatch(cli)
}
