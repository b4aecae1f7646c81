use num_bigint::BigUint;
use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("valuation of zero")]
    ValuationOfZero,

    #[error("degenerate discriminant (D = 0)")]
    DegenerateDiscriminant,

    #[error("Q must be nonzero")]
    ZeroQ,

    #[error("{0} is not prime")]
    NotPrime(BigUint),

    #[error("Q is not invertible: p = {p} divides Q")]
    QNotUnit { p: BigUint },

    #[error("not invertible in this ring (norm form is not a unit)")]
    NotInvertible,

    #[error("class vector is not in the unit group (norm form not a unit)")]
    NotUnitClass,

    #[error("operands have mismatched parameters or ring context")]
    ContextMismatch,

    #[error("operation requires ring context {expected}, got {got}")]
    WrongContext {
        expected: &'static str,
        got: &'static str,
    },

    #[error("scalar is not p-integral (negative p-valuation)")]
    NonIntegralScalar,

    #[error("no quadratic order: characteristic polynomial is reducible over Q")]
    ReducibleParams,

    #[error("{0} is not squarefree (or is 0 or 1)")]
    NotSquarefree(num_bigint::BigInt),

    #[error("enumeration too large: {what} = {size} exceeds limit {limit}")]
    EnumerationTooLarge {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
