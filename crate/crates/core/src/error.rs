use thiserror::Error;

/// Errors produced while building, validating, or analysing metric Lie algebras.
#[derive(Debug, Error)]
pub enum Error {
    #[error("document parse error: {0}")]
    Parse(String),

    #[error("basis index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("bracket entry ({i},{j}) must satisfy i < j")]
    BracketOrder { i: usize, j: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("inner product is not symmetric positive-definite: {0}")]
    NotPositiveDefinite(String),

    #[error("Jacobi identity fails: defect {defect:.3e} at basis triple ({},{},{})", .triple.0 + 1, .triple.1 + 1, .triple.2 + 1)]
    Jacobi { defect: f64, triple: (usize, usize, usize) },

    #[error("map {index} is not a derivation (defect {defect:.3e})")]
    NotDerivation { index: usize, defect: f64 },

    #[error("maps {0} and {1} do not commute")]
    NotCommuting(usize, usize),

    #[error("map {0} is not self-adjoint")]
    NotSelfAdjoint(usize),

    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is singular")]
    Singular,

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("vectors span a degenerate plane")]
    DegeneratePlane,

    #[error("algebra is not two-step nilpotent")]
    NotTwoStep,

    #[error("algebra is not nilpotent")]
    NotNilpotent,

    #[error("metric is not an algebraic Ricci soliton (defect {0:.3e})")]
    NotSoliton(f64),

    #[error("trace of the soliton derivation must be positive, found {0}")]
    NonPositiveTrace(f64),

    #[error("scalar curvature is zero")]
    ZeroScalar,

    #[error("normalization target cannot be reached: {0}")]
    Unachievable(String),

    #[error("invalid J-maps: {0}")]
    InvalidJMaps(String),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("columns are not orthonormal (residual {0:.3e})")]
    NotOrthonormal(f64),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
