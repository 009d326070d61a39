//! Crate-wide error type.
//!
//! Every fallible public operation reports one of a small set of categories
//! so that callers (in particular the CLI) can map failures to stable,
//! machine-readable diagnostics.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The request itself is malformed: non-discriminant `D`, `m < 2`,
    /// out-of-range oracle argument, unparsable good-function spec, ...
    #[error("bad input: {0}")]
    BadInput(String),

    /// The requested discriminant is valid but outside the domain of the
    /// algorithm (e.g. `D = -3` or `D = -4`, where `j(j-1728)` vanishes and
    /// `gamma` has a pole).
    #[error("special discriminant: {0}")]
    SpecialDiscriminant(String),

    /// The suitable-prime search space was exhausted before the coefficient
    /// height budget was covered.
    #[error("prime pool exhausted: {0}")]
    PrimePoolExhausted(String),

    /// A floating-point stage could not certify integrality of its output
    /// even at the maximum retry precision.
    #[error("rounding failure: {0}")]
    RoundingFailure(String),

    /// A per-prime computation detected an inconsistency (wrong set
    /// cardinality, asymmetry, non-split polynomial, ...) for one prime.
    /// The prime is discarded and replaced; this only escapes to callers
    /// when no replacement primes remain.
    #[error("prime rejected: {0}")]
    PrimeRejected(String),
}

impl Error {
    /// Stable one-word-ish category tag for machine consumption.
    pub fn category(&self) -> &'static str {
        match self {
            Error::BadInput(_) => "bad input",
            Error::SpecialDiscriminant(_) => "special discriminant",
            Error::PrimePoolExhausted(_) => "prime pool exhausted",
            Error::RoundingFailure(_) => "rounding failure",
            Error::PrimeRejected(_) => "prime rejected",
        }
    }
}
