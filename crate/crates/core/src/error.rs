use thiserror::Error;

use crate::coupling::PicardFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a model or operator.
    #[error("domain error: {0}")]
    Domain(String),

    /// Fields or trajectories that must share a grid do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    LinearSolver { iterations: usize, residual: f64 },

    #[error("newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    Newton { iterations: usize, residual: f64 },

    #[error("explicit diffusion is unstable: dt = {dt:e} exceeds bound {bound:e}")]
    Unstable { dt: f64, bound: f64 },

    /// Picard iteration hit its iteration cap; the last iterate and the history are kept.
    #[error("picard iteration did not converge after {} iterations (residual {:e})", .0.history.len(), .0.last_residual())]
    PicardNotConverged(Box<PicardFailure>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameter gate failed: {0}")]
    Gate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
