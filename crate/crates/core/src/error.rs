use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "coupling constraint g1(g1^2 - 2 g2^2 + sqrt2 g2 g4) = 0 violated, residual {residual:e}"
    )]
    ConstraintViolated { residual: f64 },

    #[error("coordinates {i} and {j} coincide up to sign")]
    CoincidingCoordinates { i: usize, j: usize },

    #[error("coordinate {index} is zero")]
    ZeroCoordinate { index: usize },

    #[error("pole collision: {0}")]
    PoleCollision(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("eigenvalue solver did not converge")]
    EigenNonConvergence,

    #[error("trajectory approached a singularity at step {step} (distance {distance:e})")]
    SingularityApproached { step: usize, distance: f64 },

    #[error(
        "no Bethe solutions found after {attempts} seeds ({diverged} diverged, {stalled} stalled)"
    )]
    NoSolutionsFound {
        attempts: usize,
        diverged: usize,
        stalled: usize,
    },

    #[error("random combination stayed degenerate after {attempts} attempts")]
    DegenerateCombination { attempts: usize },

    #[error("ill-conditioned extraction: {0}")]
    ExtractionFailure(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
