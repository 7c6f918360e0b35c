use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::format::FormatError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Core(#[from] desmod_core::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 3 for an exhausted state budget, 2 for every other input or validation error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(desmod_core::Error::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        if self.exit_code() == 3 {
            "budget"
        } else {
            "input"
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
