use thiserror::Error;

/// Errors produced by the numeric kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands disagree in dimension, truncation level or grid layout.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Input outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Index outside the sampled range.
    #[error("index out of range: {0}")]
    Index(String),

    /// Request exceeds a configured resource guard.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A solver state left the finite range.
    #[error("solution diverged at t = {time}")]
    Divergence { time: f64 },

    /// Scenario name not present in the registry.
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
