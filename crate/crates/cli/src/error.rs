use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] endogen::Error),

    #[error("config: {0}")]
    Config(String),

    #[error("verification failed:\n{0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 0 ok, 1 I/O, 2 out of scope, 3 precondition, 4 verification.
    pub fn exit_code(&self) -> u8 {
        use endogen::Error as E;
        match self {
            CliError::Io { .. } => 1,
            CliError::Core(E::Supersingular { .. } | E::UncertifiedRing { .. } | E::ScaleLimit { .. }) => 2,
            CliError::Core(E::Inconsistent(_)) | CliError::Verification(_) => 4,
            CliError::Core(_) | CliError::Config(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
