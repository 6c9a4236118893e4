use thiserror::Error;

use crate::hopf::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("element or functional is not positive (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("{what}: residual {residual:e} exceeds tolerance {tol:e}")]
    Residual {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("{what}: solution space has dimension {found}, expected {expected}")]
    SolutionSpace {
        what: &'static str,
        found: usize,
        expected: usize,
    },

    #[error("quantum group axioms violated:\n{0}")]
    Axioms(Box<ValidationReport>),

    #[error("functional is not an idempotent state (residual {residual:e})")]
    NotIdempotent { residual: f64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("state order is asymmetric: φ₁⋆φ₂ residual {forward:e}, φ₂⋆φ₁ residual {swapped:e}")]
    OrderAsymmetry { forward: f64, swapped: f64 },

    #[error("states {0} and {1} are mutually below each other")]
    Antisymmetry(usize, usize),

    #[error("unknown model {0:?}")]
    UnknownModel(String),

    #[error("unknown export format {0:?}")]
    UnknownFormat(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
