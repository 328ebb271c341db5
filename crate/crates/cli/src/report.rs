//! Report envelopes and the run manifest.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use polardist::Tolerances;

pub const TOOL_VERSION: &str = concat!("polardist ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Flags as parsed, with defaults filled in.
    pub params: Value,
    /// Derived settings: distance description, tolerances.
    pub resolved: Value,
    pub version: String,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, params: Value, resolved: Value, elapsed: Duration) -> Self {
        Self {
            command: command.to_string(),
            params,
            resolved,
            version: TOOL_VERSION.to_string(),
            duration_seconds: elapsed.as_secs_f64(),
        }
    }
}

pub fn resolved(metric: Option<String>, tol: &Tolerances) -> Value {
    serde_json::json!({ "metric": metric, "tolerances": tol })
}

/// Puts the manifest first in a report object.
pub fn envelope(manifest: &RunManifest, body: Value) -> Value {
    let mut out = serde_json::Map::new();
    out.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
    match body {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}

/// Report content without the wall-clock field, for replay comparison.
pub fn numeric_content(report: &Value) -> Value {
    let mut v = report.clone();
    if let Some(m) = v.get_mut("manifest").and_then(Value::as_object_mut) {
        m.remove("duration_seconds");
    }
    v
}

/// JSON paths whose values differ between two reports.
pub fn differences(a: &Value, b: &Value) -> Vec<String> {
    let mut out = Vec::new();
    diff_into(a, b, String::new(), &mut out);
    out
}

fn diff_into(a: &Value, b: &Value, path: String, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, va) in x {
                match y.get(k) {
                    Some(vb) => diff_into(va, vb, format!("{path}/{k}"), out),
                    None => out.push(format!("{path}/{k}")),
                }
            }
            out.extend(y.keys().filter(|k| !x.contains_key(*k)).map(|k| format!("{path}/{k}")));
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                diff_into(va, vb, format!("{path}/{i}"), out);
            }
        }
        _ if a == b => {}
        _ => out.push(if path.is_empty() { "/".into() } else { path }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn duration_is_ignored() {
        let m1 = RunManifest::new("verify", json!({"a": 1}), json!(null), Duration::from_millis(3));
        let m2 = RunManifest::new("verify", json!({"a": 1}), json!(null), Duration::from_millis(9));
        let a = envelope(&m1, json!({"x": 0.1}));
        let b = envelope(&m2, json!({"x": 0.1}));
        assert_ne!(a, b);
        assert!(differences(&numeric_content(&a), &numeric_content(&b)).is_empty());
    }

    #[test]
    fn differences_name_paths() {
        let a = json!({"x": [1.0, 2.0], "y": {"z": true}});
        let b = json!({"x": [1.0, 2.5], "y": {"z": true, "w": 1}});
        assert_eq!(differences(&a, &b), vec!["/x/1".to_string(), "/y/w".to_string()]);
    }

    #[test]
    fn manifest_comes_first() {
        let m = RunManifest::new("realize", json!({}), json!(null), Duration::ZERO);
        let v = envelope(&m, json!({"chords": [1.0]}));
        assert_eq!(v.as_object().unwrap().keys().next().unwrap(), "manifest");
    }
}
