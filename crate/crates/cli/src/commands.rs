//! Command implementations. Each returns the full JSON report and an exit code;
//! writing is left to the caller so replay can re-run without side effects.

use std::fs;
use std::time::Instant;

use serde_json::{json, Value};

use polardist::verifier::conditions::AngleTriple;
use polardist::verifier::embedding::{build_pyramid, gram_determinant};
use polardist::verifier::search::{search_angle_counterexample, search_violation, SearchTarget};
use polardist::verifier::tau::{prop2_monotonicity_probe, scan_tau, tau_grid, CrossingSample};
use polardist::{check_axioms, load_states, DistanceSpec, Error, Measure, SampleConfig, Tolerances};

use crate::args::{
    ComputeArgs, MetricArgs, ProbeTauArgs, RealizeArgs, ScanTauArgs, SearchArgs, Target, TolProfile, VerifyArgs,
};
use crate::report::{envelope, resolved, RunManifest};
use crate::{CliError, EXIT_OK, EXIT_VIOLATION};

pub struct Run {
    pub report: Value,
    pub exit: i32,
    /// One-line summary for standard error.
    pub summary: String,
}

fn tolerances(profile: TolProfile) -> Tolerances {
    match profile {
        TolProfile::Default => Tolerances::default(),
        TolProfile::Strict => Tolerances::strict(),
    }
}

/// Builds and validates the distance selected on the command line.
pub fn build_spec(m: &MetricArgs) -> Result<DistanceSpec, CliError> {
    if m.metric.uses_tau() && m.tau.is_none() {
        return Err(CliError::usage(format!("--tau is required for metric {}", m.metric)));
    }
    let mut spec = DistanceSpec::new(m.metric);
    if let Some(tau) = m.tau {
        spec = spec.with_tau(tau);
    }
    if let Some(d0) = m.d0 {
        spec = spec.with_bound(d0);
    }
    if let Some(c) = m.cosine {
        spec = spec.with_cosine(c);
    }
    if let Some(p) = m.polarization {
        spec = spec.with_polarization(p);
    }
    spec.validate()?;
    Ok(spec)
}

fn sample_config(dim: usize, measure: Measure, rank: Option<usize>, seed: u64, count: u64) -> SampleConfig {
    match measure {
        Measure::HaarPure => SampleConfig::haar(dim, seed, count),
        Measure::GinibreMixed => SampleConfig::ginibre(dim, rank.unwrap_or(dim), seed, count),
    }
}

fn params<T: serde::Serialize>(args: &T) -> Value {
    serde_json::to_value(args).expect("flags serialize")
}

pub fn compute(args: &ComputeArgs) -> Result<Run, CliError> {
    let start = Instant::now();
    let spec = build_spec(&args.metric)?;
    let tol = Tolerances::default();
    let text = fs::read_to_string(&args.states)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.states.display())))?;
    let states = load_states(&text, &tol)?;
    let mut pairs = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let d = spec.distance(&states[i], &states[j], &tol)?;
            let c = d.components;
            pairs.push(json!({
                "i": i,
                "j": j,
                "distance": d.value,
                "f_a": c.map(|c| c.f_a),
                "f_b": c.map(|c| c.f_b),
                "g": c.map(|c| c.g),
            }));
        }
    }
    let body = json!({ "metric": spec.describe(), "states": states.len(), "pairs": pairs });
    let manifest = RunManifest::new("compute", params(args), resolved(Some(spec.describe()), &tol), start.elapsed());
    Ok(Run {
        report: envelope(&manifest, body),
        exit: EXIT_OK,
        summary: format!("{}: {} pairs", spec.describe(), pairs.len()),
    })
}

pub fn verify(args: &VerifyArgs, jobs: usize) -> Result<Run, CliError> {
    let start = Instant::now();
    let spec = build_spec(&args.metric)?;
    let tol = tolerances(args.tol_profile);
    let cfg = sample_config(args.dim, args.measure, args.rank, args.seed, args.samples);
    let report = check_axioms(&spec, &cfg, &tol, jobs)?;
    let exit = if report.any_violation() { EXIT_VIOLATION } else { EXIT_OK };
    let summary = report.summary();
    let mut body = serde_json::to_value(&report).expect("report serializes");
    body["summary"] = Value::String(summary.clone());
    let manifest = RunManifest::new("verify", params(args), resolved(Some(spec.describe()), &tol), start.elapsed());
    Ok(Run { report: envelope(&manifest, body), exit, summary })
}

pub fn search(args: &SearchArgs, jobs: usize) -> Result<Run, CliError> {
    let start = Instant::now();
    let tol = tolerances(args.tol_profile);
    if args.budget == 0 {
        return Err(CliError::usage("--budget must be at least 1".into()));
    }
    let (metric, result) = match args.target {
        Target::AbstractAngle => (None, search_angle_counterexample(args.budget, args.seed, &tol)?),
        t => {
            let spec = build_spec(&args.metric_args())?;
            let target = match t {
                Target::Triangle => SearchTarget::Triangle,
                Target::AngleEq5 => SearchTarget::AngleEq5,
                _ => SearchTarget::AngleEq6,
            };
            let cfg = sample_config(args.dim, args.measure, args.rank, args.seed, args.budget);
            (Some(spec.describe()), search_violation(&spec, &cfg, target, args.budget, &tol, jobs)?)
        }
    };
    let summary = format!(
        "search {}: found={} slack={:.5e} after {} evaluations",
        serde_json::to_value(args.target).expect("target serializes").as_str().unwrap_or_default(),
        result.found,
        result.slack,
        result.evaluations
    );
    let mut body = json!({ "target": args.target, "metric": metric });
    body.as_object_mut()
        .expect("object")
        .extend(serde_json::to_value(&result).expect("result serializes").as_object().cloned().unwrap_or_default());
    let manifest = RunManifest::new("search", params(args), resolved(metric, &tol), start.elapsed());
    let exit = if result.found { EXIT_VIOLATION } else { EXIT_OK };
    Ok(Run { report: envelope(&manifest, body), exit, summary })
}

pub fn scan(args: &ScanTauArgs) -> Result<(Run, String), CliError> {
    let start = Instant::now();
    let taus = tau_grid(args.tau_min, args.tau_max, args.steps)?;
    let table = scan_tau(&args.x, &taus)?;
    let csv = table.to_csv();
    let body = serde_json::to_value(&table).expect("table serializes");
    let manifest = RunManifest::new("scan-tau", params(args), Value::Null, start.elapsed());
    let run = Run {
        report: envelope(&manifest, body),
        exit: EXIT_OK,
        summary: format!("{} tau points for {} curves", table.rows.len(), table.xs.len()),
    };
    Ok((run, csv))
}

pub fn probe(args: &ProbeTauArgs) -> Result<Run, CliError> {
    let start = Instant::now();
    let taus = tau_grid(args.tau_min, args.tau_max, args.steps)?;
    let crossing = CrossingSample { count: args.crossing_samples, seed: args.seed };
    let report = prop2_monotonicity_probe(&args.x, &taus, args.h, crossing)?;
    let exit = if report.findings.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    let summary = format!(
        "{} grid points, {} crossing triples, {} findings",
        report.grid_points,
        report.crossing_triples,
        report.findings.len()
    );
    let body = serde_json::to_value(&report).expect("report serializes");
    let manifest = RunManifest::new("probe-tau", params(args), Value::Null, start.elapsed());
    Ok(Run { report: envelope(&manifest, body), exit, summary })
}

pub fn realize(args: &RealizeArgs) -> Result<Run, CliError> {
    let start = Instant::now();
    let tol = Tolerances::default();
    let triple = |v: &[f64]| -> Result<[f64; 3], CliError> {
        v.try_into().map_err(|_| CliError::usage("expected exactly three comma-separated values".into()))
    };
    let t = match (&args.angles, &args.g) {
        (Some(a), _) => {
            let [ab, bc, ac] = triple(a)?;
            AngleTriple::new(ab, bc, ac)?
        }
        (None, Some(g)) => {
            let [ab, bc, ac] = triple(g)?;
            AngleTriple::from_cosines(ab, bc, ac)?
        }
        (None, None) => return Err(CliError::usage("one of --angles or --g is required".into())),
    };
    let f = triple(&args.f)?;
    let det = gram_determinant(&t);
    let pyramid = build_pyramid(f, t.cosines(), &tol)?;
    let body = json!({
        "angles": [t.phi_ab, t.phi_bc, t.phi_ac],
        "cosines": t.cosines(),
        "f": f,
        "gram_determinant": det,
        "embedding": pyramid.embedding,
        "chords": pyramid.chords,
        "distances": pyramid.distances,
        "max_side_error": pyramid.max_side_error,
    });
    let manifest = RunManifest::new("realize", params(args), resolved(None, &tol), start.elapsed());
    Ok(Run {
        report: envelope(&manifest, body),
        exit: EXIT_OK,
        summary: format!("realized; max side error {:.3e}", pyramid.max_side_error),
    })
}

/// Rebuilds a report from its manifest.
pub fn rerun(manifest: &Value, jobs: usize) -> Result<Run, CliError> {
    let command = manifest.get("command").and_then(Value::as_str).unwrap_or_default();
    let params = manifest.get("params").cloned().unwrap_or(Value::Null);
    let bad = |e: serde_json::Error| CliError::usage(format!("manifest parameters do not parse: {e}"));
    match command {
        "compute" => compute(&serde_json::from_value(params).map_err(bad)?),
        "verify" => verify(&serde_json::from_value(params).map_err(bad)?, jobs),
        "search" => search(&serde_json::from_value(params).map_err(bad)?, jobs),
        "scan-tau" => scan(&serde_json::from_value(params).map_err(bad)?).map(|(r, _)| r),
        "probe-tau" => probe(&serde_json::from_value(params).map_err(bad)?),
        "realize" => realize(&serde_json::from_value(params).map_err(bad)?),
        other => Err(CliError::usage(format!("manifest names unknown command '{other}'"))),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_core(e)
    }
}
