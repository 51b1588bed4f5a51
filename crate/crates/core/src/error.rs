use crate::variational::SolveResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("charge {charge} coincides with another point: distance is zero")]
    ZeroDistance { charge: usize },

    #[error("no grid node lies strictly inside the domain at spacing h = {h}")]
    DomainTooSmall { h: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch { what: &'static str, expected: usize, actual: usize },

    #[error("fields are sampled on different grids")]
    GridMismatch,

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("no boundary value for boundary node {node} (i={}, j={}, k={})", ijk[0], ijk[1], ijk[2])]
    MissingBoundaryValue { node: usize, ijk: [usize; 3] },

    #[error("point ({x}, {y}, {z}) does not match any grid node")]
    OffGrid { x: f64, y: f64, z: f64 },

    #[error("solver did not converge in {} iterations (residual {:.3e})", .0.iterations, .0.harmonicity_residual)]
    NotConverged(Box<SolveResult>),

    #[error("relaxation stalled after {steps} accepted steps: step length fell below {min_step:e}")]
    Stalled { steps: usize, min_step: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
