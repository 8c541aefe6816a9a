use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    /// The requested suite does not apply to the configured regime.
    #[error("premise not met: {0}")]
    Premise(String),

    #[error(transparent)]
    Core(#[from] tumor_immune_core::Error),

    #[error("cannot write `{}`: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration and premise errors, 3 for runtime failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Premise(_) => 2,
            CliError::Core(tumor_immune_core::Error::Domain { .. }) => 2,
            CliError::Core(_) | CliError::Write { .. } => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
