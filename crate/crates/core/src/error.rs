use thiserror::Error;

/// Errors raised by state construction, dynamics and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("not normalized: {0}")]
    NotNormalized(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("trajectory time grids do not match")]
    GridMismatch,

    #[error("trajectory has no samples")]
    EmptyTrajectory,

    #[error("empty input")]
    EmptyInput,

    #[error("slit experiment is missing subset {0}")]
    MissingSubset(String),

    #[error("invalid slit model: {0}")]
    InvalidModel(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
