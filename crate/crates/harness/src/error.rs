use std::path::PathBuf;

use conmezo::{ConfigError, StepError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid problem '{spec}': {reason}")]
    Problem { spec: String, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Optimizer(#[from] ConfigError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("every grid cell diverged")]
    AllDiverged,
    #[error("bench needs d >= {min} for a meaningful measurement, got d = {d}")]
    BenchTooSmall { d: usize, min: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Errors caused by user input rather than by a failed run.
    pub fn is_usage(&self) -> bool {
        matches!(self, Self::Problem { .. } | Self::Config(_) | Self::Optimizer(_) | Self::BenchTooSmall { .. })
            || matches!(self, Self::Json { source, .. } if !source.is_io())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
