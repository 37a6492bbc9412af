//! Exact symbolic computation for 2-typical formal group laws over the
//! Brown-Peterson coefficient ring: truncated power series over graded
//! polynomial rings, the Hazewinkel law, the twisted ring T(A*), the power
//! operation, and triangular-ideal closure checks.

pub mod coeff;
pub mod fgl;
pub mod ideals;
pub mod poly;
pub mod powerop;
pub mod report;
pub mod series;
pub mod tring;

pub use coeff::{Coeff, RingTag};
pub use poly::{parse_poly, GradedPoly, Monomial, Variable};
pub use series::{EpsSeries, TruncSeries};

use thiserror::Error as ThisError;

#[derive(ThisError, Debug)]
pub enum Error {
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(RingTag, RingTag),
    #[error("series arity mismatch: {0} vs {1}")]
    ArityMismatch(u8, u8),
    #[error("truncation mismatch: {0} vs {1}")]
    TruncMismatch(u32, u32),
    #[error("coefficient is not 2-integral: {monomial}")]
    NotTwoIntegral { monomial: String },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("series has a nonzero constant term where none is allowed")]
    NonzeroConstantTerm,
    #[error("series has a non-invertible leading coefficient")]
    BadLeadingCoeff,
    #[error("twisted-ring context mismatch")]
    ContextMismatch,
    #[error("no power-operation table entry for {0}")]
    MissingTableEntry(String),
    #[error("ill-formed triangular ideal: {0}")]
    IllFormedIdeal(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
