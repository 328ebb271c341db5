//! Validated pure states and density matrices.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, ComplexMatrix};

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Shape("state vector must be non-empty".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("state vector has non-finite amplitudes".into()));
        }
        let dev = (norm(&amplitudes) - 1.0).abs();
        if dev > tol.norm {
            return Err(Error::NotNormalized(dev));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical(format!("cannot normalize vector of norm {n:e}")));
        }
        Ok(Self { amplitudes: amplitudes.into_iter().map(|z| z / n).collect() })
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let w = Complex64::from_polar(1.0, phase);
        Self { amplitudes: self.amplitudes.iter().map(|z| z * w).collect() }
    }

    /// Bloch angles `(theta, phi)` of a qubit state, global phase dropped.
    pub fn bloch_angles(&self) -> Option<(f64, f64)> {
        if self.dim() != 2 {
            return None;
        }
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        let theta = 2.0 * b.norm().atan2(a.norm());
        let phi = if b.norm() == 0.0 || a.norm() == 0.0 { 0.0 } else { b.arg() - a.arg() };
        Some((theta, phi))
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    /// Max-norm distance between the two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// `ρ†`, equal to `ρ` up to round-off.
    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// Mixture `(1 - w) self + w other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        self.matrix.check_same_dim(&other.matrix)?;
        Ok(Self { matrix: &self.matrix.scale(1.0 - w) + &other.matrix.scale(w) })
    }
}

/// Checks the three density-matrix invariants and wraps the matrix.
pub fn validate_density(m: ComplexMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    let asym = m.hermitian_deviation();
    if asym > tol.hermitian {
        return Err(Error::NotHermitian(asym));
    }
    let trace_dev = (m.trace().re - 1.0).abs();
    if trace_dev > tol.trace {
        return Err(Error::InvalidTrace(trace_dev));
    }
    let eig = hermitian_eigen(&m, tol)?;
    let lowest = eig.eigenvalues[0];
    if lowest < -tol.psd {
        return Err(Error::NotPsd(lowest));
    }
    Ok(DensityMatrix { matrix: m })
}

/// Projector `|psi><psi|`.
pub fn pure_to_density(psi: &PureState) -> DensityMatrix {
    let mut matrix = ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes());
    matrix.hermitize();
    DensityMatrix { matrix }
}

/// Qubit state `(cos(theta/2), e^{i phi} sin(theta/2))`.
pub fn bloch_pure(theta: f64, phi: f64) -> PureState {
    let (s, c) = (theta / 2.0).sin_cos();
    PureState { amplitudes: vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phi)] }
}

/// Either representation of a quantum state.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(p) => p.dim(),
            Self::Mixed(m) => m.dim(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            Self::Pure(p) => Some(p),
            Self::Mixed(_) => None,
        }
    }

    /// Density matrix of the state; pure states become projectors.
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            Self::Pure(p) => pure_to_density(p),
            Self::Mixed(m) => m.clone(),
        }
    }

    /// Same-state test in max norm on density matrices, so global phases cancel.
    pub fn same_state(&self, other: &Self, tol: &Tolerances) -> Result<bool> {
        Ok(self.state_difference(other)? <= tol.state_equality)
    }

    /// Max-norm distance between the density matrices of two states.
    pub fn state_difference(&self, other: &Self) -> Result<f64> {
        match (self, other) {
            (Self::Pure(a), Self::Pure(b)) => {
                if a.dim() != b.dim() {
                    return Err(Error::DimensionMismatch(a.dim(), b.dim()));
                }
                let (u, v) = (a.amplitudes(), b.amplitudes());
                let mut worst = 0.0f64;
                for i in 0..u.len() {
                    for j in i..u.len() {
                        worst = worst.max((u[i] * u[j].conj() - v[i] * v[j].conj()).norm());
                    }
                }
                Ok(worst)
            }
            (Self::Mixed(a), Self::Mixed(b)) => a.max_abs_diff(b),
            _ => self.to_density().max_abs_diff(&other.to_density()),
        }
    }
}

impl From<PureState> for QuantumState {
    fn from(p: PureState) -> Self {
        Self::Pure(p)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(m: DensityMatrix) -> Self {
        Self::Mixed(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn validate_accepts_examples() {
        assert!(validate_density(ComplexMatrix::diag(&[0.5, 0.5]), &tol()).is_ok());
        assert!(validate_density(ComplexMatrix::diag(&[0.7, 0.3]), &tol()).is_ok());
    }

    #[test]
    fn validate_reports_each_violation() {
        match validate_density(ComplexMatrix::diag(&[0.7, 0.2]), &tol()) {
            Err(Error::InvalidTrace(d)) => assert_abs_diff_eq!(d, 0.1, epsilon = 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(validate_density(ComplexMatrix::diag(&[1.5, -0.5]), &tol()), Err(Error::NotPsd(-0.5)));
        let c = |r: f64| Complex64::new(r, 0.0);
        let m = ComplexMatrix::from_rows(&[vec![c(0.5), c(0.1)], vec![c(0.0), c(0.5)]]).unwrap();
        assert!(matches!(validate_density(m, &tol()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn projector_examples() {
        let zero = pure_to_density(&PureState::basis(2, 0));
        assert_eq!(zero.matrix(), &ComplexMatrix::diag(&[1.0, 0.0]));
        let plus = PureState::normalized(vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let rho = pure_to_density(&plus);
        for z in rho.matrix().entries() {
            assert_abs_diff_eq!(z.re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
        let shifted = pure_to_density(&plus.with_global_phase(1.234));
        assert!(shifted.max_abs_diff(&rho).unwrap() < 1e-15);
    }

    #[test]
    fn bloch_examples() {
        let z = bloch_pure(0.0, 0.0);
        assert_eq!(z.amplitudes()[0], Complex64::new(1.0, 0.0));
        let one = bloch_pure(PI, 0.0);
        assert_abs_diff_eq!(one.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(one.amplitudes()[1].re, 1.0, epsilon = 1e-15);
        let ov = z.inner(&bloch_pure(PI / 2.0, 0.0)).unwrap().norm();
        assert_abs_diff_eq!(ov, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn bloch_angles_round_trip() {
        let psi = bloch_pure(1.1, -0.4).with_global_phase(0.9);
        let (t, p) = psi.bloch_angles().unwrap();
        let back = bloch_pure(t, p);
        assert!(QuantumState::from(back).same_state(&psi.into(), &tol()).unwrap());
    }

    #[test]
    fn pure_state_requires_unit_norm() {
        let v = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(PureState::new(v, &tol()), Err(Error::NotNormalized(_))));
    }
}
