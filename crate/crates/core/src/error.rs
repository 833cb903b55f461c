use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("invalid symmetry sector: {0}")]
    InvalidSector(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Krylov propagation did not converge: {0}")]
    KrylovNonConvergence(String),

    #[error("time-step refinement did not converge: difference {difference:.3e} after {refinements} halvings (step {step:.3e})")]
    RefinementNonConvergence {
        difference: f64,
        refinements: usize,
        step: f64,
    },

    #[error("dense solver budget exceeded: dimension {dim} > {budget}; use a smaller symmetry sector")]
    BudgetExceeded { dim: usize, budget: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("degenerate fit data: {0}")]
    DegenerateFit(String),

    #[error("operator leaves the working subspace: leakage norm {0:.3e}")]
    SubspaceViolation(f64),

    #[error("mean spin vanishes; squeezing direction undefined")]
    ZeroMeanSpin,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
