//! JSON state files: `{"dim": n, "states": [...]}` where each state is
//! `{"type": "pure", "vec": [[re, im], ...]}` or
//! `{"type": "mixed", "mat": [[[re, im], ...], ...]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::state::{validate_density, PureState, QuantumState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum StateRecord {
    Pure { vec: Vec<[f64; 2]> },
    Mixed { mat: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dim: usize,
    pub states: Vec<StateRecord>,
}

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl StateRecord {
    pub fn from_state(s: &QuantumState) -> Self {
        match s {
            QuantumState::Pure(p) => Self::Pure { vec: p.amplitudes().iter().map(pair).collect() },
            QuantumState::Mixed(m) => {
                Self::Mixed { mat: m.matrix().to_rows().iter().map(|r| r.iter().map(pair).collect()).collect() }
            }
        }
    }

    pub fn to_state(&self, tol: &Tolerances) -> Result<QuantumState> {
        match self {
            Self::Pure { vec } => Ok(PureState::new(vec.iter().map(complex).collect(), tol)?.into()),
            Self::Mixed { mat } => {
                let rows: Vec<Vec<Complex64>> = mat.iter().map(|r| r.iter().map(complex).collect()).collect();
                Ok(validate_density(ComplexMatrix::from_rows(&rows)?, tol)?.into())
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            Self::Pure { vec } => vec.len(),
            Self::Mixed { mat } => mat.len(),
        }
    }
}

impl StateFile {
    pub fn from_states(states: &[QuantumState]) -> Result<Self> {
        let dim = states.first().map(QuantumState::dim).ok_or_else(|| Error::StateFile("no states".into()))?;
        Ok(Self { dim, states: states.iter().map(StateRecord::from_state).collect() })
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::StateFile(e.to_string()))
    }

    /// Validates every entry against the declared dimension and the state invariants.
    pub fn to_states(&self, tol: &Tolerances) -> Result<Vec<QuantumState>> {
        if self.states.is_empty() {
            return Err(Error::StateFile("state list is empty".into()));
        }
        self.states
            .iter()
            .enumerate()
            .map(|(i, rec)| {
                if rec.dim() != self.dim {
                    return Err(Error::StateFile(format!(
                        "state {i} has dimension {}, file declares {}",
                        rec.dim(),
                        self.dim
                    )));
                }
                rec.to_state(tol).map_err(|e| Error::StateFile(format!("state {i}: {e}")))
            })
            .collect()
    }
}

/// Parses and validates a state file.
pub fn load_states(json: &str, tol: &Tolerances) -> Result<Vec<QuantumState>> {
    StateFile::parse(json)?.to_states(tol)
}
