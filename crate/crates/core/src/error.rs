use thiserror::Error;

use crate::gradflow::Diagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no bounded solution: {0}")]
    NoBoundedSolution(String),

    #[error("parameters classified as {found}, expected {expected}")]
    Classification { found: String, expected: &'static str },

    #[error("quadrature did not converge by order {order} (last relative change {change:e})")]
    Quadrature { order: usize, change: f64 },

    #[error("invariant drift {drift:e} exceeds tolerance with {substeps} substeps per grid cell")]
    InvariantDrift { drift: f64, substeps: usize },

    #[error("linear solver failure: {0}")]
    Solver(String),

    #[error("gradient flow did not converge after {} steps", .0.len())]
    NonConvergence(Box<Diagnostics>),

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status: 2 for numerical failures, 3 for invalid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) | Error::Quadrature { .. } | Error::InvariantDrift { .. } | Error::Solver(_) => 2,
            Error::Domain(_)
            | Error::NoBoundedSolution(_)
            | Error::Classification { .. }
            | Error::Input(_)
            | Error::Io(_)
            | Error::Json(_) => 3,
        }
    }
}
