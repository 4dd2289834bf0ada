//! Library side of the `specsumm` command-line tool.

pub mod commands;
pub mod file;

use std::path::Path;

pub use file::{Meta, Params, Seeds, SummaryFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed summary file: {0}")]
    Format(String),
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Core(#[from] specsumm::Error),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 for unreadable input, 2 for bad parameters or inconsistent
    /// inputs, 3 when a numerical method fails.
    pub fn exit_code(&self) -> i32 {
        use specsumm::Error as E;
        match self {
            CliError::Io { .. } | CliError::Format(_) => 1,
            CliError::Mismatch(_) => 2,
            CliError::Core(e) => match e {
                E::Parse { .. } | E::EmptyGraph | E::Io(_) => 1,
                E::Parameter(_) | E::Dimension { .. } | E::Invariant(_) | E::TooLarge { .. } => 2,
                E::Convergence { .. } | E::Step { .. } => 3,
            },
        }
    }
}
