//! Engine-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EngineError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("denominator vanishes under substitution")]
    DenominatorVanishes,

    #[error("grade mismatch: expected {expected}, got {got}")]
    GradeMismatch { expected: usize, got: usize },

    #[error("operation requires sigma_inv, which this calculus does not provide")]
    SigmaRequired,

    #[error("operation requires a module braiding sigma_E, which was not provided")]
    SigmaERequired,

    #[error("operation requires {0}, which this calculus does not provide")]
    CapabilityMissing(&'static str),

    #[error("invalid calculus specification: {0}")]
    InvalidSpec(String),

    #[error("wedge map is not surjective onto the 2-form basis")]
    WedgeNotSurjective,

    #[error("input tensor is not antisymmetric")]
    NotAntisymmetric,

    #[error("input is not in the required J-sector")]
    NotInSector,

    #[error("zero operator has no symbol")]
    ZeroOperator,

    #[error("condition ({name}) fails: {detail}")]
    ConditionFailed { name: &'static str, detail: String },
}
