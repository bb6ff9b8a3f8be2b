//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by signal generation, feature extraction, training,
/// analysis, and experiment orchestration.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its documented domain (bad window size,
    /// non-positive shape parameter, out-of-range probability, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A signal violates a structural invariant (empty, non-finite
    /// samples, non-positive sample period).
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    /// Pulse detection found no sample above the detection threshold, or
    /// the detected support is degenerate.
    #[error("no pulse detected: {0}")]
    NoPulse(String),

    /// A spectrum handed to the inverse transform is not conjugate
    /// symmetric within tolerance, so it has no real-valued time signal.
    #[error("spectrum is not conjugate-symmetric: {0}")]
    Symmetry(String),

    /// The no-deformation class (id 1) was used where a filter response
    /// is required.
    #[error("class {0} is the no-deformation class, not a filter")]
    NotAFilter(u8),

    /// Matrix/vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A dataset is unusable for the requested operation (missing class,
    /// too few elements per class, malformed row).
    #[error("dataset error: {0}")]
    Dataset(String),

    /// Training could not produce a model (for instance every restart
    /// cycle diverged).
    #[error("training failed: {0}")]
    Training(String),

    /// Experiment configuration failed validation.
    #[error("config validation failed: {0}")]
    Validation(String),

    /// A manifest replay did not reproduce the recorded artifacts.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for CLI reporting: 2 for validation-type errors,
    /// 3 for runtime/data errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Validation(_) => 2,
            _ => 3,
        }
    }
}
