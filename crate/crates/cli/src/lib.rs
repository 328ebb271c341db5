//! Command-line front end: parses flags, runs the verifier and writes reports.
//!
//! Exit codes: 0 clean run or nothing found, 1 violation found (or replay
//! mismatch, or an unrealizable triple), 2 usage or input error, 3 numerical
//! failure.

pub mod args;
pub mod commands;
pub mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::Value;

use polardist::Error;

use crate::args::{Cli, Command, OutputFormat};
use crate::commands::Run;
use crate::report::{differences, numeric_content};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: String) -> Self {
        Self { code: EXIT_USAGE, message }
    }

    pub fn from_core(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) => EXIT_NUMERICAL,
            Error::Unrealizable(_) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pairs_csv(report: &Value) -> String {
    let mut s = String::from("i,j,distance,f_a,f_b,g\n");
    for p in report["pairs"].as_array().into_iter().flatten() {
        let num = |k: &str| p[k].as_f64().map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{},{}", p["i"], p["j"], num("distance"), num("f_a"), num("f_b"), num("g"));
    }
    s
}

fn pairs_table(report: &Value) -> String {
    let mut s = format!("metric: {}\n", report["metric"].as_str().unwrap_or_default());
    let _ = writeln!(s, "{:>4} {:>4} {:>10} {:>10} {:>10} {:>10}", "i", "j", "distance", "f_a", "f_b", "g");
    for p in report["pairs"].as_array().into_iter().flatten() {
        let num = |k: &str| p[k].as_f64().map(|v| format!("{v:.5}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:>4} {:>4} {:>10} {:>10} {:>10} {:>10}",
            p["i"],
            p["j"],
            num("distance"),
            num("f_a"),
            num("f_b"),
            num("g")
        );
    }
    s
}

fn finish(run: Run, out: Option<&Path>) -> Result<i32, CliError> {
    emit(&to_json(&run.report), out)?;
    eprintln!("{}", run.summary);
    Ok(run.exit)
}

fn replay(path: &Path, jobs: usize) -> Result<i32, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let original: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{} is not a JSON report: {e}", path.display())))?;
    let manifest =
        original.get("manifest").ok_or_else(|| CliError::usage(format!("{} has no manifest", path.display())))?;
    let rerun = commands::rerun(manifest, jobs)?;
    let diffs = differences(&numeric_content(&original), &numeric_content(&rerun.report));
    if diffs.is_empty() {
        eprintln!("replay reproduced {} bit-for-bit", path.display());
        Ok(EXIT_OK)
    } else {
        eprintln!("replay differs at {} location(s):", diffs.len());
        for d in diffs.iter().take(20) {
            eprintln!("  {d}");
        }
        Ok(EXIT_VIOLATION)
    }
}

/// Runs one parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Compute(a) => commands::compute(&a).and_then(|run| {
            let text = match a.format {
                OutputFormat::Json => to_json(&run.report),
                OutputFormat::Csv => pairs_csv(&run.report),
                OutputFormat::Table => pairs_table(&run.report),
            };
            emit(&text, a.out.as_deref())?;
            Ok(run.exit)
        }),
        Command::Verify(a) => commands::verify(&a, a.jobs).and_then(|r| finish(r, a.report.as_deref())),
        Command::Search(a) => commands::search(&a, a.jobs).and_then(|r| finish(r, a.report.as_deref())),
        Command::ScanTau(a) => commands::scan(&a).and_then(|(run, csv)| {
            match a.format {
                OutputFormat::Json => emit(&to_json(&run.report), a.out.as_deref())?,
                OutputFormat::Csv | OutputFormat::Table => emit(&csv, a.out.as_deref())?,
            }
            Ok(run.exit)
        }),
        Command::ProbeTau(a) => commands::probe(&a).and_then(|r| finish(r, a.out.as_deref())),
        Command::Realize(a) => commands::realize(&a).and_then(|r| finish(r, a.out.as_deref())),
        Command::Replay(a) => replay(&a.report, a.jobs),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(CliError::from_core(Error::Numerical("x".into())).code, EXIT_NUMERICAL);
        assert_eq!(CliError::from_core(Error::Unrealizable(-0.1)).code, EXIT_VIOLATION);
        assert_eq!(CliError::from_core(Error::NotPsd(-0.5)).code, EXIT_USAGE);
        assert_eq!(CliError::from_core(Error::Incompatible("x".into())).code, EXIT_USAGE);
    }

    #[test]
    fn csv_leaves_missing_components_empty() {
        let report =
            serde_json::json!({"pairs": [{"i": 0, "j": 1, "distance": 1.0, "f_a": null, "f_b": null, "g": null}]});
        assert_eq!(pairs_csv(&report), "i,j,distance,f_a,f_b,g\n0,1,1,,,\n");
    }
}
