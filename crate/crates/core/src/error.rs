//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Polynomial text did not conform to the grammar.
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    /// A variable like `x5` was used with too few ambient variables.
    #[error("variable x{index} out of range: polynomial has {num_vars} variable(s)")]
    VariableOutOfRange { index: usize, num_vars: usize },

    /// An exact integer coefficient exceeded the configured bound.
    #[error("coefficient magnitude exceeds the configured limit {limit}")]
    CoefficientOverflow { limit: i64 },

    /// Mismatched variable counts between a polynomial/map and a point.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Builtin map name not recognized.
    #[error("unknown builtin map `{0}`")]
    UnknownBuiltin(String),

    /// A modulus that must be prime is not.
    #[error("{0} is not prime")]
    NonPrimeModulus(u64),

    /// Attempted to invert 0 modulo p.
    #[error("zero has no inverse modulo {0}")]
    ZeroInverse(u64),

    /// A multiplicative-group operation received 0 mod p.
    #[error("argument is zero modulo {0}")]
    ZeroArgument(u64),

    /// Supplied extension-field modulus polynomial factors over F_p.
    #[error("modulus polynomial is reducible over F_{0}")]
    ReduciblePolynomial(u64),

    /// An enumeration or memory bound was exceeded.
    #[error("size {size} exceeds the configured bound {bound}")]
    SizeBoundExceeded { size: u128, bound: u128 },

    /// Extension-field elements from different fields were combined.
    #[error("field mismatch: elements belong to different fields")]
    FieldMismatch,

    /// Point index outside `[0, p^n)`.
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: u64, size: u64 },

    /// Orbit cycle detection ran out of steps.
    #[error("orbit budget of {0} steps exhausted before the cycle closed")]
    BudgetExceeded(u64),

    /// A graph query required a fixed target point but the target moves.
    #[error("target point is not fixed by the map")]
    TargetNotFixed,

    /// Exact integer evaluation would overflow the representable range.
    #[error("exact integer evaluation exceeded the representable range")]
    ExactRangeExceeded,

    /// A declared fixed point moves under the map modulo p.
    #[error("declared fixed point {point:?} is not fixed modulo {p}")]
    NotFixedModP { point: Vec<i64>, p: u64 },

    /// Search configuration failed validation.
    #[error("invalid search config: {0}")]
    InvalidConfig(String),

    /// Miscellaneous invalid input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
