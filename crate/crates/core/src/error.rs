//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A spec (measure, norm, evolution, experiment config) failed validation.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// Physical grid too small to represent the requested field exactly.
    #[error("grid too small: need at least {required} points for cutoff {cutoff}, got {got}")]
    GridTooSmall {
        cutoff: usize,
        required: usize,
        got: usize,
    },

    /// The integrator met a non-finite value (blow-up / instability).
    #[error("non-finite value at t = {time} (sample {sample}): integration aborted")]
    BlowUp { time: f64, sample: usize },

    /// Every importance weight vanished (the cutoff rejected all samples).
    #[error("degenerate weights: the L2 cutoff rejected every sample")]
    DegenerateWeights,

    /// A trajectory window unusable for a discrete time transform.
    #[error("degenerate trajectory window: {0}")]
    DegenerateWindow(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
