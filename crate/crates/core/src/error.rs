//! Error type shared by every stage of the pipeline.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The weight parameters violate square summability or the floor condition.
    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    /// A kernel was evaluated exactly at one of its poles.
    #[error("evaluation at pole {pole}")]
    EvaluationAtPole { pole: f64 },

    /// Local-map parameters lie in the excluded set (a pole on {-1, 0, 1}).
    #[error("parameters in excluded set: {0:?}")]
    ExcludedParams(Vec<f64>),

    /// Newton inversion of a local map did not converge.
    #[error("newton inversion failed after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    /// Newton converged to a point outside the chart ball.
    #[error("inverse left the chart: distance {distance:e} exceeds radius {radius:e}")]
    RadiusExceeded { distance: f64, radius: f64 },

    /// A block triple left the admissible ball of the chart.
    #[error("block {block} violates chart membership (distance {distance:e}, radius {radius:e})")]
    MembershipViolation { block: i64, distance: f64, radius: f64 },

    /// The normalized target exceeds the admissible sup norm.
    #[error("target sup norm {norm} exceeds {bound}")]
    TargetTooLarge { norm: f64, bound: f64 },

    /// The doubling search for (K, T) ran out of attempts.
    #[error("parameter search exhausted after {trials} trials")]
    ParameterSearchExhausted { trials: usize },

    /// The fixed-point iteration failed.
    #[error("solver failure at step {step}: {reason}")]
    SolverFailure { step: usize, reason: String, trace: Vec<f64> },

    /// Inconsistent structural data (zero and pole sets, labelling, integer hits).
    #[error("structural error: {0}")]
    Structural(String),

    /// A registry lookup failed.
    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy { kind: &'static str, name: String, available: String },

    /// Invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// A pipeline stage failed; wraps the underlying error with the stage name.
    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),
}

impl Error {
    /// Wraps `self` with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// The innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
