use harp_core::HarpError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{module}: {source}")]
    Harp {
        module: &'static str,
        #[source]
        source: HarpError,
    },

    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),

    #[error("{0}")]
    Usage(String),

    #[error("replay: embedding digest {actual} differs from recorded {expected}")]
    ReplayMismatch { expected: String, actual: String },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Harp { source, .. } => source.kind(),
            CliError::Manifest(_) => "manifest",
            CliError::Usage(_) => "usage",
            CliError::ReplayMismatch { .. } => "replay_mismatch",
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Tags a core error with the module it came from.
pub trait Context<T> {
    fn ctx(self, module: &'static str) -> CliResult<T>;
}

impl<T> Context<T> for harp_core::Result<T> {
    fn ctx(self, module: &'static str) -> CliResult<T> {
        self.map_err(|source| CliError::Harp { module, source })
    }
}

impl<T> Context<T> for std::io::Result<T> {
    fn ctx(self, module: &'static str) -> CliResult<T> {
        self.map_err(|e| CliError::Harp {
            module,
            source: HarpError::Io(e),
        })
    }
}
