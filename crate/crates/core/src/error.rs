use std::io;

use thiserror::Error;

/// Errors produced anywhere in the field pipeline.
#[derive(Debug, Error)]
pub enum HfrepError {
    #[error("point {point:?} lies outside the domain {what}")]
    Domain { point: [f64; 3], what: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("empty boundary: the field has no sign change")]
    EmptyBoundary,

    #[error("eigensolver did not converge (worst residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("lipschitz check failed: sampled gradient norm {norm:.4} exceeds {limit}")]
    Lipschitz { norm: f64, limit: f64 },

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = HfrepError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> HfrepError {
    HfrepError::InvalidParameter(msg.into())
}
