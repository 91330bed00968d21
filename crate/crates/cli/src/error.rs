use std::path::PathBuf;

use thiserror::Error;

/// Failures of a job; all of them map to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    /// An expression or value at a config location failed to parse or
    /// validate.
    #[error("{at}: {source}")]
    At { at: String, source: pva_core::Error },
    #[error(transparent)]
    Core(#[from] pva_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Attaches a config location to a core error.
pub trait At<T> {
    fn at(self, location: impl Into<String>) -> Result<T>;
}

impl<T> At<T> for pva_core::Result<T> {
    fn at(self, location: impl Into<String>) -> Result<T> {
        self.map_err(|source| CliError::At {
            at: location.into(),
            source,
        })
    }
}
