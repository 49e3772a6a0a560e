//! Numerical tolerances shared by validation and the measure routines.

/// Hermiticity tolerance, relative to the largest entry modulus.
pub const HERMITIAN: f64 = 1e-9;
/// Allowed deviation of a density operator's trace from 1.
pub const TRACE: f64 = 1e-9;
/// Most negative eigenvalue accepted for a density operator.
pub const PSD: f64 = 1e-9;
/// Energy-degeneracy tolerance, relative to the spectral range.
pub const DEGENERACY_REL: f64 = 1e-8;
/// Below this `|Tr A|` the measure is reported as undefined.
pub const TRACE_ZERO: f64 = 1e-12;
/// Outcomes with probability at or below this are impossible.
pub const OUTCOME: f64 = 1e-12;
/// Normalization tolerance for state vectors and coefficient lists.
pub const NORMALIZATION: f64 = 1e-10;
