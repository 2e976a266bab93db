use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Numeric(#[from] brownflow::Error),

    #[error("{failed} of {total} comparisons failed")]
    CompareFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for a failed comparison, 2 for usage, config or I/O problems, 3 for
    /// numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CompareFailed { .. } => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numeric(brownflow::Error::InvalidParameter { .. } | brownflow::Error::InvalidDimension(..)) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}
