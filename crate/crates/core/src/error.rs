use thiserror::Error;

use crate::laplace::AdmissibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symbol has zeros in the open right half-plane (winding count {})", .0.winding_count)]
    NotAdmissible(Box<AdmissibilityReport>),

    #[error("symbol has zeros on the imaginary axis; kernel inversion refused")]
    BoundaryDegenerate(Box<AdmissibilityReport>),

    #[error("admissibility could not be decided: {0}")]
    Indeterminate(String),

    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    #[error("no ball of radius {radius} is mapped into itself, even for one grid step")]
    NoBall { radius: f64 },

    #[error("iteration diverged (non-finite value) at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("argument outside supported domain: {0}")]
    Domain(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("{path}:{line}: `{key}`: {message}")]
    Parse {
        path: String,
        line: usize,
        key: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
