//! Realizing an angle triple as three unit vectors in R³.
//!
//! Points `f(i) e_i` then form a pyramid over the origin whose base triangle
//! has the polarized distances as its sides.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::functionals::polarized_distance;
use crate::verifier::conditions::AngleTriple;

const DEGENERATE_ANGLE: f64 = 1e-9;
const GRAM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTriple {
    pub e_a: [f64; 3],
    pub e_b: [f64; 3],
    pub e_c: [f64; 3],
}

/// Determinant of the 3×3 Gram matrix of cosines.
pub fn gram_determinant(t: &AngleTriple) -> f64 {
    let [ab, bc, ac] = t.cosines();
    1.0 - ab * ab - bc * bc - ac * ac + 2.0 * ab * bc * ac
}

/// Places `e_a` on the z axis, `e_b` in the YZ plane and solves `e_c` from its
/// two dot products, taking the nonnegative x root.
pub fn gram_realize(t: &AngleTriple) -> Result<EmbeddingTriple> {
    t.validate()?;
    let det = gram_determinant(t);
    if det < -GRAM_TOLERANCE {
        return Err(Error::Unrealizable(det));
    }
    let e_a = [0.0, 0.0, 1.0];
    if t.phi_ab < DEGENERATE_ANGLE {
        let (s, c) = t.phi_ac.sin_cos();
        let e_c = [0.0, s, c];
        return Ok(EmbeddingTriple { e_a, e_b: e_a, e_c });
    }
    let (sab, cab) = t.phi_ab.sin_cos();
    let e_b = [0.0, sab, cab];
    let z = t.phi_ac.cos();
    let y = (t.phi_bc.cos() - z * cab) / sab;
    let x = (1.0 - y * y - z * z).max(0.0).sqrt();
    Ok(EmbeddingTriple { e_a, e_b, e_c: [x, y, z] })
}

fn dot(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn chord(fu: f64, u: &[f64; 3], fv: f64, v: &[f64; 3]) -> f64 {
    (0..3).map(|k| (fu * u[k] - fv * v[k]).powi(2)).sum::<f64>().sqrt()
}

impl EmbeddingTriple {
    /// Pairwise dot products `(e_a·e_b, e_b·e_c, e_a·e_c)`.
    pub fn dots(&self) -> [f64; 3] {
        [dot(&self.e_a, &self.e_b), dot(&self.e_b, &self.e_c), dot(&self.e_a, &self.e_c)]
    }

    /// Base-triangle sides `(|AB|, |BC|, |AC|)` for edge lengths `f`.
    pub fn chords(&self, f: [f64; 3]) -> [f64; 3] {
        [
            chord(f[0], &self.e_a, f[1], &self.e_b),
            chord(f[1], &self.e_b, f[2], &self.e_c),
            chord(f[0], &self.e_a, f[2], &self.e_c),
        ]
    }
}

/// Pyramid built from the realized triple, compared with the polarized distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pyramid {
    pub embedding: EmbeddingTriple,
    pub chords: [f64; 3],
    pub distances: [f64; 3],
    pub max_side_error: f64,
}

/// Builds the pyramid with edges `f` and cosines `g = (g_ab, g_bc, g_ac)`.
pub fn build_pyramid(f: [f64; 3], g: [f64; 3], tol: &Tolerances) -> Result<Pyramid> {
    let t = AngleTriple::from_cosines(g[0], g[1], g[2])?;
    let embedding = gram_realize(&t)?;
    let chords = embedding.chords(f);
    let distances = [
        polarized_distance(f[0], f[1], g[0], tol)?.value,
        polarized_distance(f[1], f[2], g[1], tol)?.value,
        polarized_distance(f[0], f[2], g[2], tol)?.value,
    ];
    let max_side_error = chords.iter().zip(&distances).map(|(c, d)| (c - d).abs()).fold(0.0, f64::max);
    Ok(Pyramid { embedding, chords, distances, max_side_error })
}

/// Largest deviation between the pyramid's base sides and the polarized distances.
pub fn verify_pyramid(fa: f64, fb: f64, fc: f64, g_ab: f64, g_bc: f64, g_ac: f64, tol: &Tolerances) -> Result<f64> {
    Ok(build_pyramid([fa, fb, fc], [g_ab, g_bc, g_ac], tol)?.max_side_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn assert_invariants(t: &AngleTriple, e: &EmbeddingTriple) {
        for v in [&e.e_a, &e.e_b, &e.e_c] {
            assert!((dot(v, v).sqrt() - 1.0).abs() <= 1e-10);
        }
        for (d, c) in e.dots().iter().zip(t.cosines()) {
            assert!((d - c).abs() <= 1e-9, "{d} vs {c}");
        }
    }

    #[test]
    fn orthonormal_triple() {
        let t = AngleTriple::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2).unwrap();
        let e = gram_realize(&t).unwrap();
        assert_invariants(&t, &e);
        assert_abs_diff_eq!(e.e_c[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_branch() {
        let t = AngleTriple::new(0.0, 0.8, 0.8).unwrap();
        let e = gram_realize(&t).unwrap();
        assert_eq!(e.e_a, e.e_b);
        assert_invariants(&t, &e);
    }

    #[test]
    fn unrealizable_carries_determinant() {
        let t = AngleTriple::new(0.3, 0.3, 1.0).unwrap();
        let det = gram_determinant(&t);
        assert!(det < 0.0);
        assert_eq!(gram_realize(&t), Err(Error::Unrealizable(det)));
    }

    #[test]
    fn pyramid_examples() {
        assert_eq!(verify_pyramid(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, &tol()).unwrap(), 0.0);
        let p = build_pyramid([1.0; 3], [0.0; 3], &tol()).unwrap();
        for c in p.chords {
            assert_abs_diff_eq!(c, SQRT_2, epsilon = 1e-15);
        }
        let p = build_pyramid([1.0; 3], [0.5; 3], &tol()).unwrap();
        for c in p.chords {
            assert_abs_diff_eq!(c, 1.0, epsilon = 1e-15);
        }
        assert!(matches!(verify_pyramid(1.0, 1.0, 1.0, 0.7296, 0.7296, 0.0, &tol()), Err(Error::Unrealizable(_))));
    }

    #[test]
    fn polarized_edges() {
        let err = verify_pyramid(0.5, 1.0, 2.0, 0.3, -0.2, 0.1, &tol()).unwrap();
        assert!(err <= 1e-12);
    }
}
