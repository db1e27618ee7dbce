//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix size mismatch: expected N = {expected}, got N = {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("axis {axis} out of range for dimension {n} (axes are 1-based)")]
    AxisOutOfRange { axis: usize, n: usize },

    #[error("operation requires chain degree >= {required}, got {got}")]
    DegreeTooLow { required: usize, got: usize },

    #[error("matrix is not skew-symmetric at entry ({row}, {col})")]
    NotSkewSymmetric { row: usize, col: usize },

    #[error("element is not a monomial unit (single term, nonzero coefficient)")]
    NotMonomialUnit,

    #[error("matrix is not unitriangular with monomial-unit diagonal")]
    NotUnitriangular,

    #[error("inverse verification failed: max residual {defect:.3e}")]
    InverseDefect { defect: f64 },

    #[error("idempotent defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    IdempotentDefect { defect: f64, tol: f64 },

    #[error("cochain must be normalized for this operation: {label}")]
    NormalizationRequired { label: String },

    #[error("cochain must be a derivation for this operation: {label}")]
    DerivationRequired { label: String },

    #[error("chain is not g-invariant: term has deg_{axis} = {deg}")]
    NotInvariant { axis: usize, deg: i64 },

    #[error("parity mismatch: functional degree {degree} vs chain parity {parity}")]
    ParityMismatch { degree: usize, parity: String },

    #[error("functional degree {degree} exceeds periodic chain cap {cap}")]
    DegreeAboveCap { degree: usize, cap: usize },

    #[error("parameter grid needs at least {required} points, got {got}")]
    ShortGrid { required: usize, got: usize },

    #[error("parameter grid is not uniformly spaced (step deviation {deviation:.3e})")]
    NonUniformGrid { deviation: f64 },

    #[error("matrix is not nilpotent: |F^{power}| = {norm:.3e}")]
    NotNilpotent { power: usize, norm: f64 },

    #[error("unknown verification suite '{name}'")]
    UnknownSuite { name: String },

    #[error("invalid file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
