use std::io;
use std::path::PathBuf;

use polariscope_core::abm::SimError;
use polariscope_core::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("non-finite value: {message}; state written to {}", dump.display())]
    NonFinite { message: String, dump: PathBuf },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::NonFinite { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SimError> for CliError {
    /// Non-finite simulation failures need a dump path and are converted by
    /// the caller; everything else is a configuration problem.
    fn from(e: SimError) -> Self {
        CliError::Config(e.to_string())
    }
}
