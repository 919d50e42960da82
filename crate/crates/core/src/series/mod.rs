//! Arbitrary precision complex numbers and truncated power series.

mod complex;
mod multi;
#[cfg(test)]
mod proptests;

pub use complex::{pow2, BigComplex, DEFAULT_PRECISION_BITS, MIN_PRECISION_BITS};
pub use multi::{Exponent, MultiSeries};

/// Default truncation order for potentials.
pub const DEFAULT_TRUNCATION_ORDER: u32 = 9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("variable count mismatch: expected {expected}, found {found}")]
    VarCountMismatch { expected: usize, found: usize },
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("variable index {index} out of range for {n_vars} variables")]
    BadIndex { index: usize, n_vars: usize },
    #[error("substitute {index} has a nonzero constant term")]
    NonzeroConstantTerm { index: usize },
    #[error("cannot parse number {0:?}")]
    Parse(String),
}
