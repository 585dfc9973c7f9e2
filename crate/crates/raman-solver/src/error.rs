//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, RamanError>;

/// Errors surfaced by scenario construction, the propagation kernel and the
/// reference solvers.
///
/// Solver *outcomes* (divergence of an iteration, oscillation, hitting the
/// iteration cap) are not errors; they are reported through
/// [`SolverStatus`](crate::hybrid::SolverStatus). `RamanError` covers invalid
/// inputs and failures of operations that have no status channel.
#[derive(Debug, thiserror::Error)]
pub enum RamanError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("solution diverged: {0}")]
    Divergence(String),

    #[error("integration failed at z = {z_km} km: {reason}")]
    IntegrationFailure { z_km: f64, reason: String },

    #[error("profiles not comparable: {0}")]
    ComparisonInvalid(String),

    #[error("scenario file: {0}")]
    ScenarioFile(String),
}
