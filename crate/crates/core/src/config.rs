//! Numerical tolerances shared by every layer.

use serde::{Deserialize, Serialize};

/// Every threshold used by validation, clamping and axiom checks.
///
/// Verification sweeps pass a tightened copy when re-checking witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max-norm asymmetry accepted for Hermitian input.
    pub hermitian: f64,
    /// Accepted deviation of a density-matrix trace from 1.
    pub trace: f64,
    /// Eigenvalues in `[-psd, 0)` are treated as round-off and clamped.
    pub psd: f64,
    /// Accepted deviation of a state-vector norm from 1.
    pub norm: f64,
    /// Residual imaginary part tolerated in traces of Hermitian products.
    pub imaginary: f64,
    /// Cosine values within this distance outside `[0, 1]` are clamped.
    pub cosine_clamp: f64,
    /// Relative tolerance of the triangle inequality (times the longest side).
    pub triangle_rel: f64,
    /// Absolute floor of the triangle tolerance.
    pub triangle_floor: f64,
    /// Tolerance of the angle conditions.
    pub angle: f64,
    /// Max-norm distance below which two density matrices are the same state.
    pub state_equality: f64,
    /// Distances at or below this value count as zero.
    pub zero_distance: f64,
    /// States farther apart than this (max norm) must have a nonzero distance.
    pub distinct_states: f64,
    /// Accepted asymmetry `|D(a,b) - D(b,a)|`, relative to `max(1, D)`.
    pub symmetry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-10,
            psd: 1e-10,
            norm: 1e-10,
            imaginary: 1e-10,
            cosine_clamp: 1e-12,
            triangle_rel: 1e-9,
            triangle_floor: 1e-12,
            angle: 1e-12,
            state_equality: 1e-10,
            zero_distance: 1e-9,
            distinct_states: 1e-6,
            symmetry: 1e-9,
        }
    }
}

impl Tolerances {
    /// Profile used for witness re-verification.
    pub fn strict() -> Self {
        Self { triangle_rel: 1e-12, triangle_floor: 1e-12, angle: 1e-12, symmetry: 1e-12, ..Self::default() }
    }

    /// Triangle tolerance for a triangle whose longest side is `max_side`.
    pub fn triangle_tolerance(&self, max_side: f64) -> f64 {
        (self.triangle_rel * max_side).max(self.triangle_floor)
    }
}
