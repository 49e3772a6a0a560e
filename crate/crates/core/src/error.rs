use std::fmt;

use thiserror::Error;

/// Which density-operator invariant a validation failure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    Hermitian,
    Trace,
    Psd,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::Hermitian => "hermitian",
            Invariant::Trace => "trace",
            Invariant::Psd => "psd",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad dimensions, partitions, ranges, normalizations.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A density-operator invariant does not hold.
    #[error("density operator violates {invariant} invariant: {detail}")]
    NotDensity { invariant: Invariant, detail: String },

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    /// The measure is undefined for operators with vanishing trace.
    #[error("zero trace (|Tr A| = {0:.3e}); measure undefined")]
    ZeroTrace(f64),

    /// A measurement outcome with zero probability was requested.
    #[error("impossible outcome (probability {0:.3e})")]
    ImpossibleOutcome(f64),

    /// The brute-force spinor oracle could not isolate a unique eigenstate.
    #[error("oracle: {0}")]
    Oracle(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// `true` for errors caused by malformed input as opposed to a numeric or
    /// domain failure (zero trace, impossible outcome).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_) | Error::NotDensity { .. } | Error::NotHermitian(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
