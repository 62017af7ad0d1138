//! Numerical thresholds shared by the simulator and its checks.
//!
//! Every amplitude in the walk programs is a dyadic power of `1/√2`, so any
//! genuine mismatch is of order one. The thresholds below only need to
//! absorb floating-point rounding.

/// Norm drift allowed after a unitary step.
pub const NORM: f64 = 1e-12;

/// Absolute tolerance for amplitude and probability comparisons.
pub const AMPLITUDE: f64 = 1e-10;

/// A correction passes when the corrected state has fidelity at least `1 - FIDELITY`.
pub const FIDELITY: f64 = 1e-10;

/// Outcomes below this probability are reported as impossible.
pub const IMPOSSIBLE_OUTCOME: f64 = 1e-14;

/// Amplitudes below this magnitude are dropped from sparse states.
pub const ZERO_AMPLITUDE: f64 = 1e-14;
