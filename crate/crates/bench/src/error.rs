use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] voxline_core::Error),

    #[error("elapsed time must be positive, got {0} ms")]
    InvalidMeasurement(f64),

    #[error("cannot spread {total} voxels over {segments} segments")]
    InfeasibleTarget { total: u64, segments: usize },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
