use thiserror::Error;

/// Errors produced by the library.
///
/// The variants are grouped so a front end can map them onto distinct
/// failure classes: malformed input, window/resolution violations, and
/// operator contract violations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),

    #[error("invalid prime {0}: must be >= 2")]
    InvalidPrime(u64),

    #[error("invalid alpha {0}: the integral form of the operator requires alpha > 0")]
    InvalidAlpha(f64),

    #[error("invalid wavelet index: {0}")]
    InvalidIndex(String),

    #[error("invalid window: V + M must be >= 0 (got V={v}, M={m})")]
    InvalidWindow { v: i64, m: i64 },

    #[error("window violation: {0}")]
    WindowViolation(String),

    #[error("pieces are not pairwise disjoint: {0}")]
    OverlappingPieces(String),

    #[error("nonzero scaling coefficient {0}: the scaling function is not an eigenfunction; use the direct pointwise evaluation instead")]
    ScalingNotZero(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("not a p-ary rational: {0} has a denominator that is not a power of {1}")]
    NotPAry(String, u64),

    #[error("non-canonical representative of Q_p/Z_p: {0}")]
    NonCanonical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
