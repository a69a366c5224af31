use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] fpa_core::Error),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl LabError {
    /// Process exit code: 2 for bad configuration, 3 for a policy that broke
    /// the bidding contract, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use fpa_core::Error as E;
        match self {
            LabError::Parse(_) | LabError::Read { .. } => 2,
            LabError::Core(E::Config(_) | E::InvalidSpec(_) | E::Domain(_) | E::Mode(_)) => 2,
            LabError::Core(E::ContractViolation { .. }) => 3,
            _ => 1,
        }
    }
}
