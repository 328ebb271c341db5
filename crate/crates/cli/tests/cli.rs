use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polardist")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const ORTHOGONAL: &str = r#"{"dim": 2, "states": [
    {"type": "pure", "vec": [[1.0, 0.0], [0.0, 0.0]]},
    {"type": "pure", "vec": [[0.0, 0.0], [1.0, 0.0]]}]}"#;

const MIXED_AND_PURE: &str = r#"{"dim": 2, "states": [
    {"type": "mixed", "mat": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]},
    {"type": "mixed", "mat": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}]}"#;

#[test]
fn compute_orthogonal_pures() {
    let dir = TempDir::new().unwrap();
    let states = write(&dir, "s.json", ORTHOGONAL);
    let (code, out, _) = cli(&["compute", "--metric", "bu-pure", "--states", states.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("1.41421"), "{out}");
}

#[test]
fn compute_bures_of_maximally_mixed_and_pure() {
    let dir = TempDir::new().unwrap();
    let states = write(&dir, "s.json", MIXED_AND_PURE);
    let (code, out, _) = cli(&["compute", "--metric", "bu", "--states", states.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let d = v["pairs"][0]["distance"].as_f64().unwrap();
    let oracle = (2.0 - 2.0 * 0.5f64.sqrt()).sqrt();
    assert!((d - oracle).abs() < 1e-12);
    assert!((d - 0.76537).abs() < 5e-6);
    assert!((v["pairs"][0]["g"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["manifest"]["command"], "compute");
}

#[test]
fn compute_csv_has_header_and_components() {
    let dir = TempDir::new().unwrap();
    let states = write(&dir, "s.json", MIXED_AND_PURE);
    let (code, out, _) = cli(&["compute", "--metric", "hs", "--states", states.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("i,j,distance,f_a,f_b,g"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 6);
    // |I/2 - |0><0||_F = sqrt(1/2)
    assert!((row[2].parse::<f64>().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn compute_usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let states = write(&dir, "s.json", ORTHOGONAL);
    let s = states.to_str().unwrap();
    let (code, _, err) = cli(&["compute", "--metric", "tau-pure", "--states", s]);
    assert_eq!(code, 2);
    assert!(err.contains("--tau"), "{err}");
    let bad = write(&dir, "bad.json", r#"{"dim": 2, "states": [{"type": "pure", "vec": [[1.0, 0.0], [1.0, 0.0]]}]}"#);
    assert_eq!(cli(&["compute", "--metric", "bu", "--states", bad.to_str().unwrap()]).0, 2);
    assert_eq!(cli(&["compute", "--metric", "bu", "--states", "/nonexistent/file.json"]).0, 2);
    assert_eq!(cli(&["compute", "--metric", "no-such-metric", "--states", s]).0, 2);
    let mixed = write(&dir, "m.json", MIXED_AND_PURE);
    assert_eq!(cli(&["compute", "--metric", "bu-pure", "--states", mixed.to_str().unwrap()]).0, 2);
}

#[test]
fn verify_quasi_db_reports_quasi_distance() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let (code, _, err) = cli(&[
        "verify",
        "--metric",
        "quasi-db",
        "--dim",
        "2",
        "--samples",
        "10000",
        "--measure",
        "haar",
        "--seed",
        "7",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "{err}");
    let r = read_json(&report);
    for key in ["manifest", "axioms", "angle_conditions", "classification"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["classification"], "quasi-distance");
    assert_eq!(r["axioms"]["d4"]["holds"], false);
    assert!(r["axioms"]["d4"]["witness"]["indices"].is_array());
    assert_eq!(r["manifest"]["params"]["seed"], 7);
    assert!(r["manifest"]["resolved"]["tolerances"]["triangle_rel"].is_number());
}

#[test]
fn verify_clean_metrics_exit_0() {
    let (code, out, err) = cli(&["verify", "--metric", "bu-pure", "--dim", "4", "--samples", "2000"]);
    assert_eq!(code, 0, "{err}");
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["classification"], "distance");
    assert!(err.contains("no violation found in 2000 samples"));
    // projector route for a mixed-state metric on pure samples
    assert_eq!(cli(&["verify", "--metric", "bu", "--measure", "haar", "--dim", "2", "--samples", "1000"]).0, 0);
    let (code, out, _) = cli(&["verify", "--metric", "trivial", "--dim", "3", "--samples", "100"]);
    assert_eq!(code, 0);
    assert!(out.contains("inconclusive"));
}

#[test]
fn verify_rejects_incompatible_measure() {
    let (code, _, err) =
        cli(&["verify", "--metric", "bu-pure", "--measure", "ginibre", "--dim", "2", "--samples", "10"]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(cli(&["verify", "--metric", "bu", "--dim", "1", "--samples", "10"]).0, 2);
    assert_eq!(cli(&["verify", "--metric", "tau-bounded", "--dim", "2"]).0, 2);
}

#[test]
fn search_exit_codes() {
    assert_eq!(cli(&["search", "--target", "abstract-angle", "--budget", "0"]).0, 2);
    assert_eq!(cli(&["search", "--target", "triangle", "--metric", "bu-pure", "--budget", "0"]).0, 2);
    let (code, out, err) = cli(&["search", "--target", "triangle", "--metric", "bu-pure", "--budget", "100000"]);
    assert_eq!(code, 0, "{err}");
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["found"], false);
    assert!(r["evaluations"].as_u64().unwrap() <= 100_000);
}

#[test]
fn search_abstract_angle_witness() {
    let (code, out, _) = cli(&["search", "--target", "abstract-angle", "--budget", "10000"]);
    assert_eq!(code, 1);
    let r: Value = serde_json::from_str(&out).unwrap();
    let w = &r["witness"];
    assert_eq!(w["kind"], "cosines");
    assert!(w["triangle_slack"].as_f64().unwrap() >= 0.0);
    assert!(w["angle_slack"].as_f64().unwrap() < -1e-12);
    let mut g: Vec<f64> = w["cosines"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    g.sort_by(f64::total_cmp);
    // two equal cosines near 0.73 and one near 0, as in the (g, g, 0) family
    assert!(g[0] < 0.05 && (g[1] - g[2]).abs() < 0.05 && (g[2] - 0.73).abs() < 0.05, "{g:?}");
}

#[test]
fn search_quasi_db_embeds_states() {
    let (code, out, _) =
        cli(&["search", "--target", "triangle", "--metric", "quasi-db", "--dim", "2", "--budget", "2000"]);
    assert_eq!(code, 1);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["witness"]["kind"], "states");
    assert_eq!(r["witness"]["states"].as_array().unwrap().len(), 3);
    assert_eq!(r["witness"]["states"][0]["type"], "pure");
    assert!(r["slack"].as_f64().unwrap() < -0.8);
}

#[test]
fn scan_tau_defaults() {
    let (code, out, _) =
        cli(&["scan-tau", "--x", "0.9,0.6,0.2", "--tau-min", "0.01", "--tau-max", "10", "--steps", "200"]);
    assert_eq!(code, 0);
    let row = out.lines().find(|l| l.starts_with("1.0,")).expect("tau = 1 row");
    let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
    let oracle = [1.0, 0.9f64.acos(), 0.6f64.acos(), 0.2f64.acos(), 0.9f64.acos() + 0.6f64.acos()];
    for (a, b) in v.iter().zip(oracle) {
        assert!((a - b).abs() < 1e-15);
    }
    for (a, b) in v[1..].iter().zip([0.45103, 0.92730, 1.36944]) {
        assert!((a - b).abs() < 5e-6);
    }
    let (_, single, _) = cli(&["scan-tau", "--x", "0.5"]);
    assert!(single.starts_with("tau,arccos_x1\n"));
    assert_eq!(cli(&["scan-tau", "--x", "1.5"]).0, 2);
    assert_eq!(cli(&["scan-tau", "--tau-min", "5", "--tau-max", "1"]).0, 2);
}

#[test]
fn realize_examples() {
    let (code, out, _) = cli(&["realize", "--angles", "1.5708,1.5708,1.5708"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    for c in r["chords"].as_array().unwrap() {
        assert!((c.as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-4);
    }
    let (code, out, _) = cli(&["realize", "--g", "0.5,0.5,0.5", "--f", "1,1,1"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    for c in r["chords"].as_array().unwrap() {
        assert!((c.as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
    assert!(r["max_side_error"].as_f64().unwrap() <= 1e-12);
    let (code, _, err) = cli(&["realize", "--g", "0.7296,0.7296,0", "--f", "1,1,1"]);
    assert_eq!(code, 1);
    assert!(err.contains("Gram determinant"), "{err}");
    assert_eq!(cli(&["realize", "--g", "0.5,0.5"]).0, 2);
    assert_eq!(cli(&["realize"]).0, 2);
}

#[test]
fn replay_detects_tampering() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let (code, _, _) = cli(&["realize", "--g", "0.2,0.4,0.6", "--out", report.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(cli(&["replay", "--report", report.to_str().unwrap()]).0, 0);
    let mut r = read_json(&report);
    r["chords"][1] = Value::from(r["chords"][1].as_f64().unwrap() + 1e-16_f64.max(f64::EPSILON));
    std::fs::write(&report, serde_json::to_string(&r).unwrap()).unwrap();
    let (code, _, err) = cli(&["replay", "--report", report.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("/chords/1"), "{err}");
    let plain = write(&dir, "plain.json", "{}");
    assert_eq!(cli(&["replay", "--report", plain.to_str().unwrap()]).0, 2);
}

#[test]
fn probe_tau_is_clean() {
    let (code, out, _) = cli(&["probe-tau", "--crossing-samples", "1000"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["findings"].as_array().unwrap().len(), 0);
    assert_eq!(r["crossing_triples"], 1000);
    assert_eq!(cli(&["probe-tau", "--h", "0.1"]).0, 2);
}
