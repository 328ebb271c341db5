//! Counterexample search for the triangle inequality and the angle conditions.
//!
//! Half of the evaluation budget goes to a sampling phase; the rest refines the
//! few most negative candidates with a downhill simplex over the state
//! parameterization (Bloch angles for qubit pure states, the sampler's latent
//! Gaussian coordinates otherwise). A candidate is reported only if its slack,
//! recomputed from the witness coordinates, also fails at the strict profile.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::metric::DistanceSpec;
use crate::sampling::{uniform_stream, Measure, SampleConfig};
use crate::state::{bloch_pure, QuantumState};
use crate::statefile::StateRecord;
use crate::verifier::axioms::with_jobs;
use crate::verifier::conditions::{check_angle_condition_all, check_triangle, AngleTriple, Check};
use crate::verifier::simplex::{minimize, SimplexOptions};

/// Candidates handed from the sampling phase to refinement.
const REFINE_STARTS: usize = 4;
const SAMPLE_BLOCK: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchTarget {
    Triangle,
    AngleEq5,
    AngleEq6,
}

impl fmt::Display for SearchTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Triangle => "triangle",
            Self::AngleEq5 => "angle-eq5",
            Self::AngleEq6 => "angle-eq6",
        })
    }
}

impl FromStr for SearchTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangle" => Ok(Self::Triangle),
            "angle-eq5" => Ok(Self::AngleEq5),
            "angle-eq6" => Ok(Self::AngleEq6),
            other => Err(Error::Domain(format!("unknown search target '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameterization {
    /// `(θ, φ)` per qubit state.
    Bloch,
    /// Interleaved `(re, im)` amplitudes before normalization.
    HaarLatent,
    /// Row-major `(re, im)` entries of the `dim × rank` Ginibre factor.
    GinibreLatent,
}

/// A triple of states with everything needed to rebuild and re-score it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateWitness {
    pub parameterization: Parameterization,
    pub dim: usize,
    pub rank: usize,
    /// Coordinates of each of the three states.
    pub params: Vec<Vec<f64>>,
    /// Sampler indices when the witness came straight from the sampling phase.
    pub source_indices: Option<[u64; 3]>,
    pub states: Vec<StateRecord>,
    /// `(D_ab, D_bc, D_ac)`.
    pub distances: [f64; 3],
    /// `(g_ab, g_bc, g_ac)`.
    pub cosines: [f64; 3],
}

/// Abstract cosine triple for the bounded-form search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineWitness {
    /// `(g_ab, g_bc, g_ac)`.
    pub cosines: [f64; 3],
    /// Sides `sqrt(1 - g)`.
    pub distances: [f64; 3],
    pub angles: [f64; 3],
    pub triangle_slack: f64,
    pub angle_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SearchWitness {
    States(StateWitness),
    Cosines(CosineWitness),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub found: bool,
    /// Slack of the best candidate; negative means the condition fails.
    pub slack: f64,
    pub evaluations: u64,
    /// Best candidate; re-verified before `found` is set.
    pub witness: Option<SearchWitness>,
}

fn parameterization(cfg: &SampleConfig) -> Parameterization {
    match cfg.measure {
        Measure::HaarPure if cfg.dim == 2 => Parameterization::Bloch,
        Measure::HaarPure => Parameterization::HaarLatent,
        Measure::GinibreMixed => Parameterization::GinibreLatent,
    }
}

fn state_params(p: Parameterization, cfg: &SampleConfig, index: u64, tol: &Tolerances) -> Result<Vec<f64>> {
    match p {
        Parameterization::Bloch => {
            let s = cfg.sample(index, tol)?;
            let (theta, phi) = s.as_pure().and_then(|ps| ps.bloch_angles()).expect("qubit pure sample");
            Ok(vec![theta, phi])
        }
        Parameterization::HaarLatent | Parameterization::GinibreLatent => Ok(cfg.latent(index)),
    }
}

fn state_from_params(p: Parameterization, cfg: &SampleConfig, x: &[f64], tol: &Tolerances) -> Result<QuantumState> {
    match p {
        Parameterization::Bloch => Ok(bloch_pure(x[0], x[1]).into()),
        Parameterization::HaarLatent | Parameterization::GinibreLatent => cfg.state_from_latent(x, tol),
    }
}

struct Scored {
    check: Check,
    distances: [f64; 3],
    cosines: [f64; 3],
}

fn score(spec: &DistanceSpec, target: SearchTarget, s: &[QuantumState; 3], tol: &Tolerances) -> Result<Scored> {
    let pairs = [(0usize, 1usize), (1, 2), (0, 2)];
    let mut distances = [0.0; 3];
    let mut cosines = [0.0; 3];
    let mut gaps = [0.0; 3];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let e = spec.evaluate(&s[i], &s[j], tol)?;
        distances[k] = e.distance.value;
        cosines[k] = e.cosine;
        gaps[k] = e.gap;
    }
    let check = match target {
        SearchTarget::Triangle => check_triangle(distances[0], distances[1], distances[2], tol)?,
        SearchTarget::AngleEq5 | SearchTarget::AngleEq6 => {
            let t = AngleTriple::from_gaps(gaps)?;
            check_angle_condition_all(&t, target == SearchTarget::AngleEq6, tol)?
        }
    };
    Ok(Scored { check, distances, cosines })
}

fn split(flat: &[f64], per: usize) -> [&[f64]; 3] {
    [&flat[..per], &flat[per..2 * per], &flat[2 * per..]]
}

fn states_from_flat(
    p: Parameterization,
    cfg: &SampleConfig,
    flat: &[f64],
    tol: &Tolerances,
) -> Result<[QuantumState; 3]> {
    let per = flat.len() / 3;
    let [a, b, c] = split(flat, per);
    Ok([state_from_params(p, cfg, a, tol)?, state_from_params(p, cfg, b, tol)?, state_from_params(p, cfg, c, tol)?])
}

/// Keeps the `k` smallest `(value, key)` pairs in ascending order.
fn keep_best<K: PartialOrd + Copy>(mut v: Vec<(f64, K)>, k: usize) -> Vec<(f64, K)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal)));
    v.truncate(k);
    v
}

fn phase_budgets(budget: u64) -> (u64, u64) {
    let sampling = budget.div_ceil(2).max(1);
    (sampling, budget - sampling)
}

/// Searches sampled state triples for a violation of `target` under `spec`.
pub fn search_violation(
    spec: &DistanceSpec,
    cfg: &SampleConfig,
    target: SearchTarget,
    budget: u64,
    tol: &Tolerances,
    jobs: usize,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::Domain("search budget must be at least 1".into()));
    }
    spec.validate()?;
    cfg.validate()?;
    spec.check_measure(cfg.measure)?;
    let p = parameterization(cfg);
    let (n_sample, n_refine) = phase_budgets(budget);

    let blocks: Vec<(u64, u64)> = (0..n_sample.div_ceil(SAMPLE_BLOCK))
        .map(|b| (b * SAMPLE_BLOCK, ((b + 1) * SAMPLE_BLOCK).min(n_sample)))
        .collect();
    let sampled = with_jobs(jobs, || {
        blocks
            .par_iter()
            .map(|&(start, end)| -> Result<Vec<(f64, u64)>> {
                let mut local = Vec::with_capacity((end - start) as usize);
                for t in start..end {
                    let s = [cfg.sample(3 * t, tol)?, cfg.sample(3 * t + 1, tol)?, cfg.sample(3 * t + 2, tol)?];
                    local.push((score(spec, target, &s, tol)?.check.slack, t));
                }
                Ok(keep_best(local, REFINE_STARTS))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let starts = keep_best(sampled.into_iter().flatten().collect(), REFINE_STARTS);

    // candidate coordinates, with sampler indices for unrefined ones
    let mut candidates: Vec<(Vec<f64>, Option<[u64; 3]>)> = Vec::new();
    for &(_, t) in &starts {
        let idx = [3 * t, 3 * t + 1, 3 * t + 2];
        let mut flat = Vec::new();
        for i in idx {
            flat.extend(state_params(p, cfg, i, tol)?);
        }
        candidates.push((flat, Some(idx)));
    }

    let mut evaluations = n_sample;
    if n_refine > 0 && !starts.is_empty() {
        let k = starts.len() as u64;
        let step = if p == Parameterization::Bloch { 0.2 } else { 0.3 };
        let refined = with_jobs(jobs, || {
            candidates
                .par_iter()
                .enumerate()
                .filter_map(|(i, (x0, _))| {
                    let share = n_refine / k + u64::from((i as u64) < n_refine % k);
                    if share == 0 {
                        return None;
                    }
                    let objective =
                        |x: &[f64]| match states_from_flat(p, cfg, x, tol).and_then(|s| score(spec, target, &s, tol)) {
                            Ok(sc) => sc.check.slack,
                            Err(_) => f64::INFINITY,
                        };
                    Some(minimize(objective, x0, SimplexOptions { max_evals: share as usize, step, f_tol: 1e-15 }))
                })
                .collect::<Vec<_>>()
        })?;
        for r in refined {
            evaluations += r.evals as u64;
            candidates.push((r.x, None));
        }
    }

    // re-score every candidate from its coordinates and keep the most negative
    let mut best: Option<(f64, usize)> = None;
    for (i, (flat, _)) in candidates.iter().enumerate() {
        if let Ok(sc) = states_from_flat(p, cfg, flat, tol).and_then(|s| score(spec, target, &s, tol)) {
            if best.is_none_or(|(b, _)| sc.check.slack < b) {
                best = Some((sc.check.slack, i));
            }
        }
    }
    let Some((_, bi)) = best else {
        return Ok(SearchResult { found: false, slack: f64::NAN, evaluations, witness: None });
    };
    let (flat, source_indices) = candidates.swap_remove(bi);
    let states = states_from_flat(p, cfg, &flat, tol)?;
    let sc = score(spec, target, &states, tol)?;
    let strict = score(spec, target, &states, &Tolerances::strict())?;
    let found = !sc.check.holds && !strict.check.holds && strict.check.slack < -1e-12;

    let per = flat.len() / 3;
    let witness = StateWitness {
        parameterization: p,
        dim: cfg.dim,
        rank: cfg.rank,
        params: flat.chunks(per).map(<[f64]>::to_vec).collect(),
        source_indices,
        states: states.iter().map(StateRecord::from_state).collect(),
        distances: sc.distances,
        cosines: sc.cosines,
    };
    Ok(SearchResult { found, slack: sc.check.slack, evaluations, witness: Some(SearchWitness::States(witness)) })
}

/// Slack of a state witness recomputed from its coordinates.
pub fn replay_state_witness(
    spec: &DistanceSpec,
    cfg: &SampleConfig,
    target: SearchTarget,
    w: &StateWitness,
    tol: &Tolerances,
) -> Result<f64> {
    let flat: Vec<f64> = w.params.concat();
    let states = states_from_flat(w.parameterization, cfg, &flat, tol)?;
    Ok(score(spec, target, &states, tol)?.check.slack)
}

/// Slack of a state witness recomputed from its sampler indices.
pub fn replay_from_indices(
    spec: &DistanceSpec,
    cfg: &SampleConfig,
    target: SearchTarget,
    idx: [u64; 3],
    tol: &Tolerances,
) -> Result<f64> {
    let s = [cfg.sample(idx[0], tol)?, cfg.sample(idx[1], tol)?, cfg.sample(idx[2], tol)?];
    Ok(score(spec, target, &s, tol)?.check.slack)
}

/// Triangle and simplified-angle verdicts for `D = sqrt(1 - g)` on a cosine triple.
pub fn score_cosines(g: [f64; 3], tol: &Tolerances) -> Result<CosineWitness> {
    let g = g.map(|v| v.clamp(0.0, 1.0));
    let distances = g.map(|v| (1.0 - v).sqrt());
    let tri = check_triangle(distances[0], distances[1], distances[2], tol)?;
    let t = AngleTriple::from_cosines(g[0], g[1], g[2])?;
    let ang = check_angle_condition_all(&t, true, tol)?;
    Ok(CosineWitness {
        cosines: g,
        distances,
        angles: [t.phi_ab, t.phi_bc, t.phi_ac],
        triangle_slack: tri.slack,
        angle_slack: ang.slack,
    })
}

/// Whether a cosine triple is a genuine counterexample: the sides satisfy
/// every triangle rotation while the simplified angle condition fails.
pub fn is_angle_counterexample(g: [f64; 3], tol: &Tolerances) -> Result<bool> {
    let w = score_cosines(g, tol)?;
    let tri = check_triangle(w.distances[0], w.distances[1], w.distances[2], tol)?;
    Ok(tri.holds && w.angle_slack < -tol.angle)
}

/// Robust objective: negative only when the angle condition fails and the
/// triangle holds, most negative when both margins are large.
fn counterexample_objective(g: &[f64], tol: &Tolerances) -> f64 {
    match score_cosines([g[0], g[1], g[2]], tol) {
        Ok(w) => w.angle_slack.max(-w.triangle_slack),
        Err(_) => f64::INFINITY,
    }
}

/// Searches cosine triples in `[0, 1]³` where `D = sqrt(1 - g)` is a
/// three-point distance but the simplified angle condition fails.
pub fn search_angle_counterexample(budget: u64, seed: u64, tol: &Tolerances) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::Domain("search budget must be at least 1".into()));
    }
    let (n_sample, n_refine) = phase_budgets(budget);
    let per_axis = (n_sample as f64).cbrt().floor() as u64;
    let per_axis = if per_axis >= 2 { per_axis } else { 0 };
    let grid_points = per_axis.pow(3);

    let mut scored: Vec<(f64, u64)> = Vec::with_capacity(n_sample as usize);
    let mut points: Vec<[f64; 3]> = Vec::with_capacity(n_sample as usize);
    for i in 0..n_sample {
        let g = if i < grid_points {
            let m = per_axis - 1;
            let (a, b, c) = (i / (per_axis * per_axis), (i / per_axis) % per_axis, i % per_axis);
            [a as f64 / m as f64, b as f64 / m as f64, c as f64 / m as f64]
        } else {
            let u = uniform_stream(seed, i, 3);
            [u[0], u[1], u[2]]
        };
        scored.push((counterexample_objective(&g, tol), i));
        points.push(g);
    }
    let starts = keep_best(scored, REFINE_STARTS);
    let mut candidates: Vec<Vec<f64>> = starts.iter().map(|&(_, i)| points[i as usize].to_vec()).collect();

    let mut evaluations = n_sample;
    if n_refine > 0 {
        let k = starts.len() as u64;
        let refined: Vec<_> = (0..starts.len())
            .filter_map(|i| {
                let share = n_refine / k + u64::from((i as u64) < n_refine % k);
                (share > 0).then(|| {
                    minimize(
                        |x: &[f64]| counterexample_objective(x, tol),
                        &candidates[i],
                        SimplexOptions { max_evals: share as usize, step: 0.05, f_tol: 1e-15 },
                    )
                })
            })
            .collect();
        for r in refined {
            evaluations += r.evals as u64;
            candidates.push(r.x);
        }
    }

    let best = candidates
        .iter()
        .map(|x| [x[0].clamp(0.0, 1.0), x[1].clamp(0.0, 1.0), x[2].clamp(0.0, 1.0)])
        .min_by(|a, b| counterexample_objective(a, tol).total_cmp(&counterexample_objective(b, tol)))
        .expect("at least one candidate");
    let w = score_cosines(best, tol)?;
    let found = is_angle_counterexample(best, tol)? && is_angle_counterexample(best, &Tolerances::strict())?;
    Ok(SearchResult { found, slack: w.angle_slack, evaluations, witness: Some(SearchWitness::Cosines(w)) })
}
