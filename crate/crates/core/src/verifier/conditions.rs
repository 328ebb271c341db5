//! Triangle inequality and the angle conditions on `φ = arccos g`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Three pairwise angles in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleTriple {
    pub phi_ab: f64,
    pub phi_bc: f64,
    pub phi_ac: f64,
}

impl AngleTriple {
    pub fn new(phi_ab: f64, phi_bc: f64, phi_ac: f64) -> Result<Self> {
        let t = Self { phi_ab, phi_bc, phi_ac };
        t.validate()?;
        Ok(t)
    }

    /// Angles `arccos(g)` of three cosines in `[-1, 1]`.
    pub fn from_cosines(g_ab: f64, g_bc: f64, g_ac: f64) -> Result<Self> {
        for g in [g_ab, g_bc, g_ac] {
            if !(-1.0..=1.0).contains(&g) {
                return Err(Error::Domain(format!("cosine {g} outside [-1, 1]")));
            }
        }
        Ok(Self { phi_ab: g_ab.acos(), phi_bc: g_bc.acos(), phi_ac: g_ac.acos() })
    }

    /// Angles from `1 - g` values in `[0, 2]`, accurate for small angles.
    pub fn from_gaps(gaps: [f64; 3]) -> Result<Self> {
        let mut phi = [0.0; 3];
        for (p, &gap) in phi.iter_mut().zip(&gaps) {
            if !(0.0..=2.0).contains(&gap) {
                return Err(Error::Domain(format!("cosine gap {gap} outside [0, 2]")));
            }
            *p = 2.0 * (gap / 2.0).sqrt().asin();
        }
        Ok(Self { phi_ab: phi[0], phi_bc: phi[1], phi_ac: phi[2] })
    }

    pub fn validate(&self) -> Result<()> {
        for phi in [self.phi_ab, self.phi_bc, self.phi_ac] {
            if !(0.0..=PI).contains(&phi) {
                return Err(Error::Domain(format!("angle {phi} outside [0, π]")));
            }
        }
        Ok(())
    }

    pub fn cosines(&self) -> [f64; 3] {
        [self.phi_ab.cos(), self.phi_bc.cos(), self.phi_ac.cos()]
    }

    /// The three relabelings that put each angle in the pivot (`ac`) slot.
    fn rotations(&self) -> [Self; 3] {
        [
            *self,
            Self { phi_ab: self.phi_ac, phi_bc: self.phi_bc, phi_ac: self.phi_ab },
            Self { phi_ab: self.phi_ab, phi_bc: self.phi_ac, phi_ac: self.phi_bc },
        ]
    }
}

/// Verdict of an inequality check; `slack < 0` measures the violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub slack: f64,
}

/// Angle condition with `φ_ac` as pivot.
///
/// The full form bounds `φ_ac` above by `min(φ_ab + φ_bc, 2π - φ_ab - φ_bc)`;
/// the simplified form (all angles at most π/2) by `φ_ab + φ_bc`.
pub fn check_angle_condition(t: &AngleTriple, simplified: bool, tol: &Tolerances) -> Result<Check> {
    t.validate()?;
    if simplified {
        for phi in [t.phi_ab, t.phi_bc, t.phi_ac] {
            if phi > FRAC_PI_2 + 1e-12 {
                return Err(Error::Domain(format!("simplified angle condition needs angles <= π/2, got {phi}")));
            }
        }
    }
    let sum = t.phi_ab + t.phi_bc;
    let lower = t.phi_ac - (t.phi_ab - t.phi_bc).abs();
    let upper = if simplified { sum - t.phi_ac } else { sum.min(TAU - sum) - t.phi_ac };
    let slack = lower.min(upper);
    Ok(Check { holds: slack >= -tol.angle, slack })
}

/// Angle condition under all three pivot choices; reports the smallest slack.
pub fn check_angle_condition_all(t: &AngleTriple, simplified: bool, tol: &Tolerances) -> Result<Check> {
    let mut slack = f64::INFINITY;
    for r in t.rotations() {
        slack = slack.min(check_angle_condition(&r, simplified, tol)?.slack);
    }
    Ok(Check { holds: slack >= -tol.angle, slack })
}

/// Triangle inequality over all three rotations, with a tolerance relative to
/// the longest side.
pub fn check_triangle(d_ab: f64, d_bc: f64, d_ac: f64, tol: &Tolerances) -> Result<Check> {
    for d in [d_ab, d_bc, d_ac] {
        if !(d >= 0.0) {
            return Err(Error::Domain(format!("distances must be nonnegative, got {d}")));
        }
    }
    let slack = (d_ab + d_bc - d_ac).min(d_ab + d_ac - d_bc).min(d_bc + d_ac - d_ab);
    let max_side = d_ab.max(d_bc).max(d_ac);
    Ok(Check { holds: slack >= -tol.triangle_tolerance(max_side), slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn angle_examples() {
        let c = check_angle_condition(&AngleTriple::new(0.0, 0.0, 0.0).unwrap(), false, &tol()).unwrap();
        assert!(c.holds);
        let right = AngleTriple::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap();
        for simplified in [false, true] {
            let c = check_angle_condition(&right, simplified, &tol()).unwrap();
            assert!(c.holds);
            assert_abs_diff_eq!(c.slack, FRAC_PI_2, epsilon = 1e-15);
        }
        let t = AngleTriple::from_cosines(0.7296, 0.7296, 0.0).unwrap();
        assert_abs_diff_eq!(t.phi_ab, 0.7296f64.acos(), epsilon = 1e-15);
        let c = check_angle_condition(&t, true, &tol()).unwrap();
        assert!(!c.holds);
        assert_abs_diff_eq!(c.slack, 2.0 * 0.7296f64.acos() - FRAC_PI_2, epsilon = 1e-14);
        assert_eq!(check_angle_condition_all(&t, true, &tol()).unwrap().slack, c.slack);
    }

    #[test]
    fn full_condition_uses_wraparound_bound() {
        // φ_ab + φ_bc = 5π/3 > π, so the 2π - sum branch is active
        let t = AngleTriple::new(5.0 * PI / 6.0, 5.0 * PI / 6.0, PI / 2.0).unwrap();
        let c = check_angle_condition(&t, false, &tol()).unwrap();
        assert_abs_diff_eq!(c.slack, PI / 3.0 - PI / 2.0, epsilon = 1e-14);
        assert!(!c.holds);
    }

    #[test]
    fn simplified_rejects_obtuse_and_out_of_range() {
        assert!(check_angle_condition(&AngleTriple { phi_ab: 2.0, phi_bc: 0.1, phi_ac: 0.1 }, true, &tol()).is_err());
        assert!(AngleTriple::new(-0.1, 0.0, 0.0).is_err());
        assert!(AngleTriple::new(4.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn triangle_examples() {
        assert!(check_triangle(0.0, 0.0, 0.0, &tol()).unwrap().holds);
        let c = check_triangle(0.52, 0.52, 1.0, &tol()).unwrap();
        assert!(c.holds);
        assert_abs_diff_eq!(c.slack, 0.04, epsilon = 1e-12);
        let c = check_triangle(0.1, 0.2, 0.5, &tol()).unwrap();
        assert!(!c.holds);
        assert_abs_diff_eq!(c.slack, -0.2, epsilon = 1e-15);
        assert!(check_triangle(-0.1, 0.2, 0.5, &tol()).is_err());
    }

    #[test]
    fn triangle_tolerance_is_relative() {
        let big = 1e6;
        assert!(check_triangle(big, big, 2.0 * big + 1e-4, &tol()).unwrap().holds);
        assert!(!check_triangle(1.0, 1.0, 2.0 + 1e-4, &tol()).unwrap().holds);
    }
}
