//! Numerical tolerances shared across the crate.

/// Max-entry deviation from Hermiticity for operators and states.
pub const HERMITIAN: f64 = crate::tensor::HERMITIAN_TOL;

/// Allowed deviation of a state's trace from one.
pub const TRACE: f64 = 1e-10;

/// Smallest eigenvalue still treated as non-negative.
pub const PSD: f64 = -1e-9;

/// Slack around [0, 1] for probabilities and POVM spectra.
pub const PROBABILITY: f64 = 1e-9;

/// Bloch vectors may exceed unit length by this much.
pub const BLOCH_NORM: f64 = 1e-12;

/// Imaginary residue above which a real-valued trace is rejected.
pub const IMAG_RESIDUE: f64 = 1e-8;

/// Channel trace preservation: max-entry distance of Σ K†K from I.
pub const TRACE_PRESERVING: f64 = 1e-10;

/// Reconstruction of a witness from its decomposition.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Purity deviation accepted when a state must be pure.
pub const PURITY: f64 = 1e-10;

/// Probability vectors must sum to one within this.
pub const PROB_SUM: f64 = 1e-12;
