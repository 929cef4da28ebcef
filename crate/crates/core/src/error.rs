use thiserror::Error;

/// Errors shared by the whole crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("conductor mismatch: zeta({order}) does not live in Q(zeta_{conductor})")]
    ConductorMismatch { order: u64, conductor: u64 },

    #[error("decimal literals are only allowed in approximate mode")]
    DecimalInExactMode,

    #[error("division by zero")]
    DivisionByZero,

    #[error("scalars belong to different fields")]
    FieldMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("{0} is not representable in this field")]
    NotRepresentable(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("generator {0} has no assigned matrix")]
    UnassignedGenerator(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("matrix is not a pseudo-reflection: {0}")]
    NotPseudoReflection(String),
}

pub type Result<T> = std::result::Result<T, Error>;
