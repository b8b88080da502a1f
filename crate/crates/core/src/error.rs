//! Engine-wide error type.

use std::fmt;

/// Errors raised by the symbolic engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// Two values built over different rings were combined.
    RingMismatch,
    /// A variable name is not part of the ring.
    UnknownVariable(String),
    /// A result exceeded the ring's total-degree cap.
    DegreeCapExceeded { degree: i64, cap: i64 },
    /// A negative exponent appeared in a variable that is not the
    /// designated Laurent slot.
    LaurentViolation { var: String },
    /// Division by the zero polynomial.
    DivisionByZero,
    /// An operation received a zero value where a nonzero one is required.
    ZeroInput(&'static str),
    /// A documented precondition does not hold.
    Precondition(String),
    /// An iteration limit was exhausted before the procedure finished.
    MaxStepsExhausted { steps: usize },
    /// A mathematically guaranteed identity failed to hold; indicates a bug
    /// or an input outside the guarded hypotheses.
    ConsistencyFailure(String),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::RingMismatch => write!(f, "ring mismatch"),
            EngineError::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            EngineError::DegreeCapExceeded { degree, cap } => {
                write!(f, "total degree {degree} exceeds the degree cap {cap}")
            }
            EngineError::LaurentViolation { var } => {
                write!(f, "negative exponent in non-Laurent variable `{var}`")
            }
            EngineError::DivisionByZero => write!(f, "division by zero polynomial"),
            EngineError::ZeroInput(what) => write!(f, "{what} must be nonzero"),
            EngineError::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            EngineError::MaxStepsExhausted { steps } => {
                write!(f, "iteration limit exhausted after {steps} steps")
            }
            EngineError::ConsistencyFailure(msg) => {
                write!(f, "consistency failure: {msg}")
            }
        }
    }
}

impl std::error::Error for EngineError {}

pub type Result<T> = std::result::Result<T, EngineError>;
