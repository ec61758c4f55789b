use alloc::string::String;
use alloc::vec::Vec;

/// Failure modes of the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("hbar must be positive and finite, got {0}")]
    InvalidHbar(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("flea violates the localization conditions: {0}")]
    InvalidFlea(String),

    #[error("requested {k} eigenpairs of an operator of dimension {dim}")]
    TooManyEigenpairs { k: usize, dim: usize },

    #[error(
        "eigensolver did not converge after {iterations} restarts; best residuals {residuals:?}"
    )]
    NoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("shift {0} is not below the spectrum (indefinite shifted operator)")]
    ShiftTooHigh(f64),

    #[error("inner conjugate-gradient solve failed after {0} iterations")]
    InnerSolve(usize),

    #[error("grid under-resolves the coherent-state width: {nodes:.2} nodes per sqrt(hbar), need at least {required}")]
    UnderResolved { nodes: f64, required: f64 },

    #[error("vectors are not orthonormal (defect {0:.3e})")]
    NotOrthonormal(f64),

    #[error("operator dimension {dim} exceeds the dense limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("phase-space symbol has a non-zero imaginary part at node {0}")]
    ComplexSymbol(usize),

    #[error("total mass is zero")]
    ZeroMass,

    #[error("missing angular sector n = {0}")]
    MissingSector(i32),

    #[error("particle count must be positive")]
    EmptySystem,

    #[error("chain length {0} outside the supported range 2..=14")]
    ChainLength(usize),

    #[error("solver failed at sweep point {index}: {source}")]
    Sweep {
        index: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
