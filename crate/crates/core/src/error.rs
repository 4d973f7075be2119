//! Crate-wide error type.

use crate::gan::NormalizationInfo;

/// Errors produced by calibration math, training, and dataset handling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    /// The principal logarithm is ill-defined this close to a half turn.
    #[error("rotation angle {angle:.9} rad is inside the excluded band around pi")]
    LogNearPi { angle: f64 },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("degenerate rotation mean: smallest singular value {sigma_min:.3e}")]
    DegenerateMean { sigma_min: f64 },

    #[error("invalid rotation matrix: {0}")]
    InvalidRotation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("batch of {got} rows is too small for batch statistics (need >= {need})")]
    BatchTooSmall { got: usize, need: usize },

    #[error("backward called without a preceding train-mode forward")]
    BackwardBeforeForward,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Mean A-rotation too close to identity for the SVD normalization bound;
    /// carries a usable fallback scale (max position norm over both sets).
    #[error(
        "rotation spread of the A-set is degenerate (condition {condition:.3e}); \
         fallback scale {fallback_s:.6}"
    )]
    DegenerateRotationSpread {
        condition: f64,
        fallback_s: f64,
        fallback: Box<NormalizationInfo>,
    },

    #[error("degenerate motion: {0}")]
    DegenerateMotion(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("mean iteration did not converge within {max_iter} iterations (last step {last_step:.3e})")]
    MeanNotConverged { max_iter: usize, last_step: f64 },

    #[error("training diverged at iteration {iteration}: {message}")]
    Divergence { iteration: usize, message: String },

    #[error("all {attempts} restarts failed: {last_error}")]
    AllRestartsFailed { attempts: usize, last_error: String },
}

pub type Result<T> = std::result::Result<T, Error>;
