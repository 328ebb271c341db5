//! Seeded random states.
//!
//! Every draw is a pure function of `(seed, index)`: the generator is ChaCha8
//! keyed by the seed with the sample index as its stream id, so any index range
//! can be evaluated by any worker without coordination. Samplers first draw
//! latent Gaussian coordinates and then map them to a state; the same maps are
//! used by the counterexample search to move through state space.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::state::{validate_density, DensityMatrix, PureState, QuantumState};

const GINIBRE_RETRIES: u64 = 3;
const RETRY_KEY: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    HaarPure,
    GinibreMixed,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HaarPure => "haar-pure",
            Self::GinibreMixed => "ginibre-mixed",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" | "haar-pure" => Ok(Self::HaarPure),
            "ginibre" | "ginibre-mixed" => Ok(Self::GinibreMixed),
            other => Err(Error::Domain(format!("unknown measure '{other}'"))),
        }
    }
}

/// What to sample and how many.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub dim: usize,
    pub measure: Measure,
    /// Ginibre rank; ignored for Haar sampling.
    pub rank: usize,
    pub seed: u64,
    pub count: u64,
}

impl SampleConfig {
    pub fn haar(dim: usize, seed: u64, count: u64) -> Self {
        Self { dim, measure: Measure::HaarPure, rank: dim, seed, count }
    }

    pub fn ginibre(dim: usize, rank: usize, seed: u64, count: u64) -> Self {
        Self { dim, measure: Measure::GinibreMixed, rank, seed, count }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if self.dim > crate::numerics::MAX_DIM {
            return Err(Error::DimensionTooLarge(self.dim, crate::numerics::MAX_DIM));
        }
        if self.measure == Measure::GinibreMixed && !(1..=self.dim).contains(&self.rank) {
            return Err(Error::Domain(format!("rank must be in [1, {}], got {}", self.dim, self.rank)));
        }
        if self.count == 0 {
            return Err(Error::Domain("sample count must be positive".into()));
        }
        Ok(())
    }

    /// Number of latent Gaussian coordinates per state.
    pub fn latent_len(&self) -> usize {
        match self.measure {
            Measure::HaarPure => 2 * self.dim,
            Measure::GinibreMixed => 2 * self.dim * self.rank,
        }
    }

    /// Latent coordinates of sample `index`.
    pub fn latent(&self, index: u64) -> Vec<f64> {
        gaussian_stream(self.seed, index, self.latent_len())
    }

    /// State of sample `index` under the configured measure.
    pub fn sample(&self, index: u64, tol: &Tolerances) -> Result<QuantumState> {
        match self.measure {
            Measure::HaarPure => Ok(sample_haar_pure(self, index)?.into()),
            Measure::GinibreMixed => Ok(sample_ginibre_density(self, index, tol)?.into()),
        }
    }

    /// Maps latent coordinates to a state under the configured measure.
    pub fn state_from_latent(&self, latent: &[f64], tol: &Tolerances) -> Result<QuantumState> {
        match self.measure {
            Measure::HaarPure => Ok(pure_from_latent(latent)?.into()),
            Measure::GinibreMixed => Ok(density_from_latent(latent, self.dim, self.rank, tol)?.into()),
        }
    }
}

/// Standard normal draws keyed by `(seed, index)`, via Box-Muller.
pub fn gaussian_stream(seed: u64, index: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut out = Vec::with_capacity(len + 1);
    while out.len() < len {
        // (0, 1] keeps the logarithm finite
        let u1 = 1.0 - unit_f64(&mut rng);
        let u2 = unit_f64(&mut rng);
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        out.push(r * c);
        out.push(r * s);
    }
    out.truncate(len);
    out
}

/// Uniform draws in `[0, 1)` keyed by `(seed, index)`.
pub fn uniform_stream(seed: u64, index: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..len).map(|_| unit_f64(&mut rng)).collect()
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn complex_pairs(latent: &[f64]) -> Vec<Complex64> {
    latent.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

/// Normalized complex vector from interleaved `(re, im)` coordinates.
pub fn pure_from_latent(latent: &[f64]) -> Result<PureState> {
    if latent.len() < 2 || !latent.len().is_multiple_of(2) {
        return Err(Error::Shape(format!("pure latent vector needs an even length >= 2, got {}", latent.len())));
    }
    PureState::normalized(complex_pairs(latent))
}

/// `G G† / Tr(G G†)` for the `dim x rank` matrix `G` given row-major as `(re, im)` pairs.
pub fn density_from_latent(latent: &[f64], dim: usize, rank: usize, tol: &Tolerances) -> Result<DensityMatrix> {
    if latent.len() != 2 * dim * rank {
        return Err(Error::Shape(format!(
            "Ginibre latent vector for {dim}x{rank} needs {} entries, got {}",
            2 * dim * rank,
            latent.len()
        )));
    }
    let g = complex_pairs(latent);
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            let v: Complex64 = (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum();
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    let tr = m.trace().re;
    if !(tr >= 1e-12) {
        return Err(Error::Numerical(format!("degenerate Ginibre draw (trace {tr:e})")));
    }
    validate_density(m.scale(1.0 / tr), tol)
}

/// Haar-random pure state for sample `index`.
pub fn sample_haar_pure(cfg: &SampleConfig, index: u64) -> Result<PureState> {
    pure_from_latent(&gaussian_stream(cfg.seed, index, 2 * cfg.dim))
}

/// Hilbert-Schmidt-random density matrix of the configured rank for sample `index`.
///
/// A degenerate draw is retried on a perturbed key up to three times.
pub fn sample_ginibre_density(cfg: &SampleConfig, index: u64, tol: &Tolerances) -> Result<DensityMatrix> {
    let len = 2 * cfg.dim * cfg.rank;
    let mut last = None;
    for retry in 0..=GINIBRE_RETRIES {
        let seed = cfg.seed ^ retry.wrapping_mul(RETRY_KEY);
        match density_from_latent(&gaussian_stream(seed, index, len), cfg.dim, cfg.rank, tol) {
            Ok(rho) => return Ok(rho),
            Err(e @ Error::Numerical(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Numerical("Ginibre sampling failed".into())))
}
