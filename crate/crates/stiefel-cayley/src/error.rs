use thiserror::Error;

/// Errors surfaced by manifold types, transforms, engines, and drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not on the Stiefel manifold: ||I - U^T U||_F = {residual:.3e} exceeds {tolerance:.3e}")]
    NotOnManifold { residual: f64, tolerance: f64 },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("point is numerically singular for this center: rcond(I + t^T U_up) = {rcond:.3e}")]
    SingularPoint { rcond: f64 },

    #[error("linear solve with the Schur complement failed (this indicates an internal error)")]
    LinearSolveFailure,

    #[error("operation requires p < N (the lower block is empty)")]
    EmptyBlock,

    #[error("search direction is not a descent direction: <g, d> = {g_dot_d:.3e} >= 0")]
    NotDescent { g_dot_d: f64 },

    #[error("line search exceeded {max_halvings} halvings without satisfying the Armijo condition")]
    LineSearchStalled { max_halvings: u32 },

    #[error("U + D is numerically rank deficient: |r_{index},{index}| = {diag:.3e}")]
    RankDeficient { index: usize, diag: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed instance file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
