//! The angle family `φ(x, τ) = arccos(x^τ)`: curve tables and monotonicity probes.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::uniform_stream;

/// `arccos(x^τ)`.
pub fn phi(x: f64, tau: f64) -> f64 {
    x.powf(tau).min(1.0).acos()
}

/// `φ(x, t2) - φ(x, t1)` without cancellation: once `x^τ` is small both angles
/// sit next to π/2, so the difference is taken on the complementary `arcsin`.
fn phi_difference(x: f64, t1: f64, t2: f64) -> f64 {
    let (u1, u2) = (x.powf(t1), x.powf(t2));
    if u1.max(u2) < 0.5 {
        u1.asin() - u2.asin()
    } else {
        u2.acos() - u1.acos()
    }
}

/// Ascending grid of `steps` points from `min` to `max` inclusive, with τ = 1
/// added when it falls inside the range.
pub fn tau_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) {
        return Err(Error::Domain(format!("need 0 < tau-min < tau-max, got [{min}, {max}]")));
    }
    if steps < 2 {
        return Err(Error::Domain(format!("need at least 2 grid points, got {steps}")));
    }
    let mut grid: Vec<f64> = (0..steps)
        .map(|i| if i + 1 == steps { max } else { min + (max - min) * i as f64 / (steps - 1) as f64 })
        .collect();
    if (min..=max).contains(&1.0) && !grid.contains(&1.0) {
        let at = grid.partition_point(|&t| t < 1.0);
        grid.insert(at, 1.0);
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub tau: f64,
    pub angles: Vec<f64>,
    /// `φ(x₁, τ) + φ(x₂, τ)` when at least two x values were given.
    pub sum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub xs: Vec<f64>,
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    /// CSV with header `tau,arccos_x1,...,sum_x1_x2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau");
        for i in 1..=self.xs.len() {
            out.push_str(&format!(",arccos_x{i}"));
        }
        if self.xs.len() >= 2 {
            out.push_str(",sum_x1_x2");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:?}", row.tau));
            for a in &row.angles {
                out.push_str(&format!(",{a:?}"));
            }
            if let Some(s) = row.sum {
                out.push_str(&format!(",{s:?}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates `arccos(x^τ)` for every x over an ascending τ grid.
pub fn scan_tau(xs: &[f64], taus: &[f64]) -> Result<CurveTable> {
    if xs.is_empty() || taus.is_empty() {
        return Err(Error::Domain("x values and tau grid must be non-empty".into()));
    }
    if let Some(x) = xs.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::Domain(format!("x values must lie in (0, 1), got {x}")));
    }
    if taus.iter().any(|&t| !(t > 0.0) || !t.is_finite()) || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("tau grid must be positive and strictly ascending".into()));
    }
    let rows = taus
        .iter()
        .map(|&tau| {
            let angles: Vec<f64> = xs.iter().map(|&x| phi(x, tau)).collect();
            let sum = (angles.len() >= 2).then(|| angles[0] + angles[1]);
            CurveRow { tau, angles, sum }
        })
        .collect();
    Ok(CurveTable { xs: xs.to_vec(), rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    /// `φ` failed to increase between consecutive grid points.
    AngleNotIncreasing,
    /// Central first difference not positive.
    FirstDifferenceNotPositive,
    /// First differences failed to decrease along τ.
    FirstDifferenceNotDecreasing,
    /// Second difference not negative.
    SecondDifferenceNotNegative,
    /// Second differences failed to increase along τ.
    SecondDifferenceNotIncreasing,
    /// `φ(x,τ) + φ(y,τ) < φ(z,τ)` at some τ ≥ 1 although it held at τ = 1.
    SumCrossing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub x: f64,
    pub tau: f64,
    pub value: f64,
    /// `(x, y, z)` for crossing findings.
    pub triple: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub h: f64,
    pub grid_points: usize,
    pub crossing_triples: usize,
    pub findings: Vec<Finding>,
}

impl MonotonicityReport {
    pub fn count(&self, kind: FindingKind) -> usize {
        self.findings.iter().filter(|f| f.kind == kind).count()
    }
}

/// Random `(x, y, z)` triples checked for crossings after τ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingSample {
    pub count: usize,
    pub seed: u64,
}

const CROSSING_TOL: f64 = 1e-12;

/// Finite-difference probe of the τ-monotonicity of `arccos(x^τ)` and of the
/// sum-versus-single crossing structure. Violations are returned as findings.
pub fn prop2_monotonicity_probe(
    xs: &[f64],
    taus: &[f64],
    h: f64,
    crossing: CrossingSample,
) -> Result<MonotonicityReport> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::Domain(format!("step h must be in [1e-6, 1e-3], got {h}")));
    }
    if xs.is_empty() || xs.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::Domain("x grid must be non-empty and inside (0, 1)".into()));
    }
    if taus.is_empty() || taus[0] <= h || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("tau grid must be ascending with every point above h".into()));
    }

    let mut findings = Vec::new();
    for &x in xs {
        let mut prev: Option<(f64, f64, f64)> = None;
        for &tau in taus {
            let forward = phi_difference(x, tau, tau + h);
            let backward = phi_difference(x, tau - h, tau);
            let d1 = (forward + backward) / (2.0 * h);
            let d2 = (forward - backward) / (h * h);
            let mut push = |kind, value| findings.push(Finding { kind, x, tau, value, triple: None });
            if !(d1 > 0.0) {
                push(FindingKind::FirstDifferenceNotPositive, d1);
            }
            if !(d2 < 0.0) {
                push(FindingKind::SecondDifferenceNotNegative, d2);
            }
            if let Some((prev_tau, prev_d1, prev_d2)) = prev {
                let step = phi_difference(x, prev_tau, tau);
                if !(step > 0.0) {
                    push(FindingKind::AngleNotIncreasing, step);
                }
                if !(d1 < prev_d1) {
                    push(FindingKind::FirstDifferenceNotDecreasing, d1 - prev_d1);
                }
                if !(d2 > prev_d2) {
                    push(FindingKind::SecondDifferenceNotIncreasing, d2 - prev_d2);
                }
            }
            prev = Some((tau, d1, d2));
        }
    }

    let after_one: Vec<f64> = taus.iter().copied().filter(|&t| t >= 1.0).collect();
    let mut checked = 0usize;
    let mut draw = 0u64;
    while checked < crossing.count {
        let u = uniform_stream(crossing.seed, draw, 3);
        draw += 1;
        let (x, y, z) = (u[0], u[1], u[2]);
        if !(x > 0.0 && y > 0.0 && z > 0.0) || x.acos() + y.acos() < z.acos() {
            continue;
        }
        checked += 1;
        for &tau in &after_one {
            let gap = phi(x, tau) + phi(y, tau) - phi(z, tau);
            if gap < -CROSSING_TOL {
                findings.push(Finding { kind: FindingKind::SumCrossing, x, tau, value: gap, triple: Some([x, y, z]) });
                break;
            }
        }
    }

    Ok(MonotonicityReport { h, grid_points: xs.len() * taus.len(), crossing_triples: checked, findings })
}

/// Upper limit of every curve.
pub const PHI_MAX: f64 = FRAC_PI_2;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_values() {
        assert_abs_diff_eq!(phi(0.9, 1.0), 0.45103, epsilon = 5e-6);
        assert_abs_diff_eq!(phi(0.6, 1.0), 0.92730, epsilon = 5e-6);
        assert_abs_diff_eq!(phi(0.2, 1.0), 1.36944, epsilon = 5e-6);
        assert_abs_diff_eq!(phi(0.9, 10.0), 0.9f64.powi(10).acos(), epsilon = 1e-14);
        assert!(PHI_MAX - phi(0.2, 10.0) <= 1.1e-7);
    }

    #[test]
    fn scan_layout() {
        let t = scan_tau(&[0.9, 0.6, 0.2], &[1e-9, 1.0, 10.0]).unwrap();
        assert!(t.rows[0].angles.iter().all(|&a| a < 1e-3));
        assert_abs_diff_eq!(t.rows[1].sum.unwrap(), 0.9f64.acos() + 0.6f64.acos(), epsilon = 1e-14);
        let csv = t.to_csv();
        assert!(csv.starts_with("tau,arccos_x1,arccos_x2,arccos_x3,sum_x1_x2\n"));
        let single = scan_tau(&[0.5], &[1.0]).unwrap();
        assert_eq!(single.rows[0].sum, None);
        assert!(single.to_csv().starts_with("tau,arccos_x1\n"));
        assert!(scan_tau(&[1.0], &[1.0]).is_err());
        assert!(scan_tau(&[0.5], &[2.0, 1.0]).is_err());
    }

    #[test]
    fn grid_contains_one_and_endpoints() {
        let g = tau_grid(0.01, 10.0, 200).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.01);
        assert_eq!(*g.last().unwrap(), 10.0);
        assert!(g.contains(&1.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(tau_grid(1.0, 0.5, 10).is_err());
    }

    #[test]
    fn phi_increases_for_sample_x() {
        let vals: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|&t| phi(0.6, t)).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn stable_difference_far_tail() {
        // x^τ = 1e-20 here; naive arccos differences are exactly zero
        let d = phi_difference(0.1, 20.0 - 1e-5, 20.0 + 1e-5);
        assert!(d > 0.0);
        assert_abs_diff_eq!(d / 2e-5, 10f64.ln() * 1e-20, epsilon = 1e-25);
    }

    #[test]
    fn probe_small_grid_clean() {
        let taus = tau_grid(0.1, 20.0, 50).unwrap();
        let r = prop2_monotonicity_probe(&[0.3, 0.9], &taus, 1e-5, CrossingSample { count: 200, seed: 3 }).unwrap();
        assert_eq!(r.count(FindingKind::FirstDifferenceNotPositive), 0);
        assert_eq!(r.count(FindingKind::FirstDifferenceNotDecreasing), 0);
        assert_eq!(r.count(FindingKind::SumCrossing), 0);
        assert_eq!(r.crossing_triples, 200);
        assert!(prop2_monotonicity_probe(&[0.5], &taus, 1e-2, CrossingSample { count: 0, seed: 0 }).is_err());
    }
}
