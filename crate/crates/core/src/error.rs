use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("density elements were certified against a different trace")]
    TraceMismatch,

    #[error("matrix is not Hermitian: |A - A*| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("element is not positive: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace value {value:e} is too small to normalize")]
    DegenerateTrace { value: f64 },

    #[error("eigenvalue {eigenvalue:e} lies outside the function domain [{lo}, {hi}]")]
    DomainViolation { eigenvalue: f64, lo: f64, hi: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("operation requires a commutative shape (all blocks 1x1), got {0:?}")]
    NonCommutative(Vec<usize>),

    #[error("invalid seminorm: {0}")]
    InvalidSeminorm(String),

    #[error("seminorm kernel is larger than the constants: rank {rank}, expected {expected}")]
    SeminormKernel { rank: usize, expected: usize },

    #[error("simplex iteration limit reached ({0} pivots)")]
    SimplexStalled(usize),

    #[error("perturbed element at k = {k} is not positive (minimum eigenvalue {min_eigenvalue:e}); resample h")]
    ProbeNotPositive { k: u64, min_eigenvalue: f64 },

    #[error("invalid piecewise function: {0}")]
    InvalidFunction(String),

    #[error("function takes negative value {value:e} at x = {at}")]
    NegativeFunction { value: f64, at: f64 },

    #[error("adaptive quadrature exceeded {0} intervals")]
    QuadratureLimit(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
