//! Sampling-based check of the distance axioms and the angle conditions.
//!
//! Sample `i` of the sweep is the triple of states with sampler indices
//! `3i, 3i+1, 3i+2`. The sweep is split into fixed-size blocks whose tallies
//! merge associatively, so the report does not depend on how blocks are
//! scheduled across workers.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::metric::DistanceSpec;
use crate::sampling::{Measure, SampleConfig};
use crate::state::{PureState, QuantumState};
use crate::verifier::conditions::{check_angle_condition_all, check_triangle, AngleTriple};

/// Triples per work block.
pub const BLOCK: u64 = 256;

/// Below this many samples a clean sweep is reported as inconclusive.
pub const MIN_CONCLUSIVE_SAMPLES: u64 = 1000;

const PERTURBATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// Two sampled states of one triple.
    Pair,
    /// A sampled triple.
    Triple,
    /// A state against itself.
    SelfPair,
    /// A state against a copy carrying a global phase (pure) or its adjoint (mixed).
    PhasePair,
    /// A state against a slight mixture toward its neighbour in the triple.
    PerturbedPair,
}

/// Reproducible pointer to the states that produced a slack value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    /// Sampler indices of the states involved.
    pub indices: Vec<u64>,
    pub slack: f64,
}

impl Witness {
    fn triple(&self) -> u64 {
        self.indices[0] / 3
    }

    /// Worse slack first, then lower sample index.
    fn better_than(&self, other: &Witness) -> bool {
        (self.slack, self.triple(), &self.indices) < (other.slack, other.triple(), &other.indices)
    }
}

/// Verdict for one axiom or condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomRecord {
    pub holds: bool,
    pub worst_slack: f64,
    pub checked: u64,
    pub violations: u64,
    /// Most severe violation, if any.
    pub witness: Option<Witness>,
}

impl Default for AxiomRecord {
    fn default() -> Self {
        Self { holds: true, worst_slack: f64::INFINITY, checked: 0, violations: 0, witness: None }
    }
}

impl AxiomRecord {
    fn observe(&mut self, slack: f64, holds: bool, kind: WitnessKind, indices: &[u64]) {
        self.checked += 1;
        if slack < self.worst_slack || slack.is_nan() {
            self.worst_slack = slack;
        }
        if !holds {
            self.holds = false;
            self.violations += 1;
            let w = Witness { kind, indices: indices.to_vec(), slack };
            if self.witness.as_ref().is_none_or(|cur| w.better_than(cur)) {
                self.witness = Some(w);
            }
        }
    }

    /// Associative, commutative merge of two partial records.
    pub fn merge(mut self, other: AxiomRecord) -> AxiomRecord {
        self.holds &= other.holds;
        self.worst_slack = self.worst_slack.min(other.worst_slack);
        self.checked += other.checked;
        self.violations += other.violations;
        self.witness = match (self.witness, other.witness) {
            (Some(a), Some(b)) => Some(if b.better_than(&a) { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    D1,
    D2,
    D3,
    D4,
    Eq5,
    Eq6,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Axioms {
    /// Nonnegativity.
    pub d1: AxiomRecord,
    /// Euclidean property: zero distance exactly for equal states.
    pub d2: AxiomRecord,
    /// Symmetry.
    pub d3: AxiomRecord,
    /// Triangle inequality.
    pub d4: AxiomRecord,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AngleConditions {
    /// Full condition including the `2π - (φ_ab + φ_bc)` bound.
    pub eq5: AxiomRecord,
    /// Simplified condition for angles in `[0, π/2]`.
    pub eq6: AxiomRecord,
}

/// Partial result over a block of triples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tally {
    pub axioms: Axioms,
    pub angles: AngleConditions,
    pub triples: u64,
}

impl Tally {
    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            axioms: Axioms {
                d1: self.axioms.d1.merge(other.axioms.d1),
                d2: self.axioms.d2.merge(other.axioms.d2),
                d3: self.axioms.d3.merge(other.axioms.d3),
                d4: self.axioms.d4.merge(other.axioms.d4),
            },
            angles: AngleConditions {
                eq5: self.angles.eq5.merge(other.angles.eq5),
                eq6: self.angles.eq6.merge(other.angles.eq6),
            },
            triples: self.triples + other.triples,
        }
    }

    pub fn record(&self, axiom: Axiom) -> &AxiomRecord {
        match axiom {
            Axiom::D1 => &self.axioms.d1,
            Axiom::D2 => &self.axioms.d2,
            Axiom::D3 => &self.axioms.d3,
            Axiom::D4 => &self.axioms.d4,
            Axiom::Eq5 => &self.angles.eq5,
            Axiom::Eq6 => &self.angles.eq6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Distance,
    QuasiDistance,
    PseudoDistance,
    Neither,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Distance => "distance",
            Self::QuasiDistance => "quasi-distance",
            Self::PseudoDistance => "pseudo-distance",
            Self::Neither => "neither",
            Self::Inconclusive => "inconclusive",
        })
    }
}

/// Maps axiom verdicts to the distance taxonomy.
pub fn classify(axioms: &Axioms, samples: u64) -> Classification {
    let (d1, d2, d3, d4) = (axioms.d1.holds, axioms.d2.holds, axioms.d3.holds, axioms.d4.holds);
    match (d1, d2, d3, d4) {
        (true, true, true, true) if samples < MIN_CONCLUSIVE_SAMPLES => Classification::Inconclusive,
        (true, true, true, true) => Classification::Distance,
        (true, true, true, false) => Classification::QuasiDistance,
        (true, false, true, true) => Classification::PseudoDistance,
        _ => Classification::Neither,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub metric: String,
    pub spec: DistanceSpec,
    pub dim: usize,
    pub measure: Measure,
    pub rank: usize,
    pub samples: u64,
    pub seed: u64,
    pub axioms: Axioms,
    pub angle_conditions: AngleConditions,
    pub classification: Classification,
}

impl AxiomReport {
    pub fn any_violation(&self) -> bool {
        let a = &self.axioms;
        !(a.d1.holds && a.d2.holds && a.d3.holds && a.d4.holds)
    }

    /// One-line summary that never claims a proof.
    pub fn summary(&self) -> String {
        match self.classification {
            Classification::Distance | Classification::Inconclusive => format!(
                "{}: no violation found in {} samples (dim {}, seed {}); classification {}",
                self.metric, self.samples, self.dim, self.seed, self.classification
            ),
            c => format!(
                "{}: classification {c} from {} samples (dim {}, seed {})",
                self.metric, self.samples, self.dim, self.seed
            ),
        }
    }
}

/// Checks nonnegativity, the Euclidean property, symmetry and the triangle
/// inequality, plus both angle conditions, on `cfg.count` sampled triples.
///
/// `jobs` bounds the worker count; the report does not depend on it.
pub fn check_axioms(spec: &DistanceSpec, cfg: &SampleConfig, tol: &Tolerances, jobs: usize) -> Result<AxiomReport> {
    spec.validate()?;
    cfg.validate()?;
    spec.check_measure(cfg.measure)?;

    let blocks: Vec<(u64, u64)> =
        (0..cfg.count.div_ceil(BLOCK)).map(|b| (b * BLOCK, ((b + 1) * BLOCK).min(cfg.count))).collect();
    let run = || -> Result<Vec<Tally>> {
        blocks
            .par_iter()
            .map(|&(start, end)| {
                let mut tally = Tally::default();
                for t in start..end {
                    tally = tally.merge(triple_tally(spec, cfg, t, tol)?);
                }
                Ok(tally)
            })
            .collect()
    };
    let partials = with_jobs(jobs, run)??;
    let tally = partials.into_iter().fold(Tally::default(), Tally::merge);

    let classification = classify(&tally.axioms, cfg.count);
    Ok(AxiomReport {
        metric: spec.describe(),
        spec: *spec,
        dim: cfg.dim,
        measure: cfg.measure,
        rank: cfg.rank,
        samples: cfg.count,
        seed: cfg.seed,
        axioms: tally.axioms,
        angle_conditions: tally.angles,
        classification,
    })
}

/// Runs `f` on a rayon pool with `jobs` workers (0 means the global pool).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn phase_copy(s: &QuantumState, index: u64) -> QuantumState {
    match s {
        QuantumState::Pure(p) => QuantumState::Pure(p.with_global_phase(0.5 + index as f64 * 0.618_033_988_749_895)),
        QuantumState::Mixed(m) => QuantumState::Mixed(m.adjoint()),
    }
}

fn perturbed(s: &QuantumState, toward: &QuantumState) -> Result<QuantumState> {
    match (s, toward) {
        (QuantumState::Pure(p), QuantumState::Pure(q)) => {
            let amps: Vec<Complex64> =
                p.amplitudes().iter().zip(q.amplitudes()).map(|(a, b)| a + b * PERTURBATION).collect();
            Ok(QuantumState::Pure(PureState::normalized(amps)?))
        }
        _ => Ok(QuantumState::Mixed(s.to_density().mix(&toward.to_density(), PERTURBATION)?)),
    }
}

/// Full axiom tally for sampled triple `t`.
pub fn triple_tally(spec: &DistanceSpec, cfg: &SampleConfig, t: u64, tol: &Tolerances) -> Result<Tally> {
    let idx = [3 * t, 3 * t + 1, 3 * t + 2];
    let states = [cfg.sample(idx[0], tol)?, cfg.sample(idx[1], tol)?, cfg.sample(idx[2], tol)?];
    states_tally(spec, &states, idx, tol)
}

/// Axiom tally for an explicit triple of states labelled with sampler indices.
pub fn states_tally(spec: &DistanceSpec, s: &[QuantumState; 3], idx: [u64; 3], tol: &Tolerances) -> Result<Tally> {
    let mut tally = Tally { triples: 1, ..Default::default() };
    let pairs = [(0usize, 1usize), (1, 2), (0, 2)];
    let mut dist = [0.0f64; 3];
    let mut gap = [0.0f64; 3];

    for (k, &(i, j)) in pairs.iter().enumerate() {
        let fwd = spec.evaluate(&s[i], &s[j], tol)?;
        let rev = spec.evaluate(&s[j], &s[i], tol)?;
        let (d, dr) = (fwd.distance.value, rev.distance.value);
        dist[k] = d;
        gap[k] = fwd.gap;
        let pair = [idx[i], idx[j]];

        for v in [d, dr] {
            let ok = v.is_finite() && v >= 0.0;
            tally.axioms.d1.observe(if v.is_finite() { v } else { f64::NEG_INFINITY }, ok, WitnessKind::Pair, &pair);
        }

        let sym = tol.symmetry * d.max(dr).max(1.0) - (d - dr).abs();
        tally.axioms.d3.observe(sym, sym >= 0.0, WitnessKind::Pair, &pair);

        let diff = s[i].state_difference(&s[j])?;
        observe_euclidean(&mut tally.axioms.d2, d, diff, tol, WitnessKind::Pair, &pair);
    }

    for i in 0..3 {
        let me = [idx[i]];
        let d_self = spec.distance(&s[i], &s[i], tol)?.value;
        observe_euclidean(&mut tally.axioms.d2, d_self, 0.0, tol, WitnessKind::SelfPair, &me);

        let copy = phase_copy(&s[i], idx[i]);
        let d_copy = spec.distance(&s[i], &copy, tol)?.value;
        let diff = s[i].state_difference(&copy)?;
        observe_euclidean(&mut tally.axioms.d2, d_copy, diff, tol, WitnessKind::PhasePair, &me);

        let next = (i + 1) % 3;
        let near = perturbed(&s[i], &s[next])?;
        let d_near = spec.distance(&s[i], &near, tol)?.value;
        let diff = s[i].state_difference(&near)?;
        observe_euclidean(&mut tally.axioms.d2, d_near, diff, tol, WitnessKind::PerturbedPair, &[idx[i], idx[next]]);
    }

    let tri = check_triangle(dist[0], dist[1], dist[2], tol)?;
    tally.axioms.d4.observe(tri.slack, tri.holds, WitnessKind::Triple, &idx);

    let angles = AngleTriple::from_gaps(gap)?;
    let eq5 = check_angle_condition_all(&angles, false, tol)?;
    tally.angles.eq5.observe(eq5.slack, eq5.holds, WitnessKind::Triple, &idx);
    let eq6 = check_angle_condition_all(&angles, true, tol)?;
    tally.angles.eq6.observe(eq6.slack, eq6.holds, WitnessKind::Triple, &idx);
    Ok(tally)
}

/// Equal states must be at distance zero; clearly distinct states must not be.
/// States in the gap between the two thresholds are not judged.
fn observe_euclidean(rec: &mut AxiomRecord, d: f64, diff: f64, tol: &Tolerances, kind: WitnessKind, idx: &[u64]) {
    if diff <= tol.state_equality {
        let slack = tol.zero_distance - d;
        rec.observe(slack, slack >= 0.0, kind, idx);
    } else if diff > tol.distinct_states {
        // strict positivity: distances quadratic near the diagonal are legitimately tiny here
        rec.observe(d, d > 0.0, kind, idx);
    }
}

/// Re-evaluates the triple a witness points at and returns the recorded slack
/// of the given axiom for that triple.
pub fn replay_witness(
    spec: &DistanceSpec,
    cfg: &SampleConfig,
    axiom: Axiom,
    witness: &Witness,
    tol: &Tolerances,
) -> Result<f64> {
    let tally = triple_tally(spec, cfg, witness.triple(), tol)?;
    tally
        .record(axiom)
        .witness
        .as_ref()
        .map(|w| w.slack)
        .ok_or_else(|| Error::Numerical("witness did not reproduce a violation".into()))
}
