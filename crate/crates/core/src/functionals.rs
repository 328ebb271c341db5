//! Polarization and cosine functionals and the distances built from them.
//!
//! A polarized distance has the form `D² = f(a)² + f(b)² - 2 f(a) f(b) g(a,b)`
//! with a positive polarization `f` and a symmetric cosine `g`, `|g| <= 1`.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, polar_unitary, psd_sqrt, trace_product};
use crate::state::{DensityMatrix, PureState};

/// A distance together with the polarized-form components that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceValue {
    pub value: f64,
    pub components: Option<Components>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub f_a: f64,
    pub f_b: f64,
    pub g: f64,
}

impl DistanceValue {
    pub fn bare(value: f64) -> Self {
        Self { value, components: None }
    }
}

/// Clamps round-off outside `[0, 1]`; larger excursions are domain errors.
pub fn clamp_cosine(g: f64, tol: &Tolerances) -> Result<f64> {
    if !g.is_finite() {
        return Err(Error::Domain(format!("cosine value {g} is not finite")));
    }
    if g > 1.0 + tol.cosine_clamp || g < -tol.cosine_clamp {
        return Err(Error::Domain(format!("cosine value {g} outside [0, 1]")));
    }
    Ok(g.clamp(0.0, 1.0))
}

/// `sqrt(Tr ρ²)`.
pub fn f_hs(rho: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    Ok(trace_product(rho.matrix(), rho.matrix(), tol)?.max(0.0).sqrt())
}

/// `Tr(ρ₁ρ₂) / sqrt(Tr ρ₁² Tr ρ₂²)`.
pub fn g_hs(rho1: &DensityMatrix, rho2: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    let cross = trace_product(rho1.matrix(), rho2.matrix(), tol)?;
    let p1 = trace_product(rho1.matrix(), rho1.matrix(), tol)?;
    let p2 = trace_product(rho2.matrix(), rho2.matrix(), tol)?;
    clamp_cosine(cross / (p1 * p2).sqrt(), tol)
}

/// Root fidelity `Tr sqrt(sqrt(ρ₁) ρ₂ sqrt(ρ₁))`, the sum of the singular
/// values of `sqrt(ρ₁) sqrt(ρ₂)`.
pub fn g_bu(rho1: &DensityMatrix, rho2: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    Ok(bures(rho1, rho2, tol)?.0)
}

/// Root fidelity `g` together with `1 - g`. The latter is half of
/// `min_U ||sqrt(ρ₁) U - sqrt(ρ₂)||²`, evaluated at the polar factor of
/// `sqrt(ρ₁) sqrt(ρ₂)`; it carries no cancellation for nearby states.
pub fn bures(rho1: &DensityMatrix, rho2: &DensityMatrix, tol: &Tolerances) -> Result<(f64, f64)> {
    rho1.matrix().check_same_dim(rho2.matrix())?;
    let a = psd_sqrt(rho1.matrix(), tol)?;
    let b = psd_sqrt(rho2.matrix(), tol)?;
    let x = &a * &b;
    let mut xx = &x.adjoint() * &x;
    xx.hermitize();
    let eig = hermitian_eigen(&xx, tol)?;
    if let Some(&lowest) = eig.eigenvalues.first() {
        if lowest < -tol.psd {
            return Err(Error::NotPsd(lowest));
        }
    }
    // eigenvalues at round-off level would otherwise add O(sqrt(eps)) to the sum
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let floor = 16.0 * f64::EPSILON * xx.dim() as f64 * top;
    let g: f64 = eig.eigenvalues.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).sum();
    let u = polar_unitary(&x, &eig);
    let residual = &(&a * &u) - &b;
    let gap = residual.frobenius().powi(2) / 2.0;
    Ok((clamp_cosine(g, tol)?, gap.clamp(0.0, 1.0)))
}

/// `|<ψ₁|ψ₂>|`, the pure-state Bures cosine.
pub fn pure_overlap(psi1: &PureState, psi2: &PureState) -> Result<f64> {
    Ok(psi1.inner(psi2)?.norm().min(1.0))
}

/// `1 - |<ψ₁|ψ₂>|²`. Close states go through the component of `ψ₂`
/// orthogonal to `ψ₁`, where the direct form cancels.
pub fn pure_infidelity(psi1: &PureState, psi2: &PureState) -> Result<f64> {
    let c = psi1.inner(psi2)?;
    let o2 = c.norm_sqr();
    if o2 < 0.5 {
        return Ok((1.0 - o2).clamp(0.0, 1.0));
    }
    let r: f64 = psi1.amplitudes().iter().zip(psi2.amplitudes()).map(|(a, b)| (b - c * a).norm_sqr()).sum();
    Ok(r.clamp(0.0, 1.0))
}

/// `1 - g^τ` from `1 - g` for `g` in `[0, 1]`.
pub fn gap_pow(gap: f64, tau: f64) -> f64 {
    if gap >= 1.0 {
        return 1.0;
    }
    -(tau * (-gap).ln_1p()).exp_m1()
}

/// Polarized distance written through `1 - g`: `sqrt((fa - fb)² + 2 fa fb (1 - g))`.
pub fn polarized_distance_gap(fa: f64, fb: f64, g: f64, gap: f64, tol: &Tolerances) -> Result<DistanceValue> {
    let v = polarized_distance(fa, fb, g, tol)?;
    let value = ((fa - fb) * (fa - fb) + 2.0 * fa * fb * gap.max(0.0)).sqrt();
    Ok(DistanceValue { value, ..v })
}

/// `sqrt(fa² + fb² - 2 fa fb g)`.
pub fn polarized_distance(fa: f64, fb: f64, g: f64, tol: &Tolerances) -> Result<DistanceValue> {
    if !(fa > 0.0 && fb > 0.0) || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Domain(format!("polarization must be positive, got ({fa}, {fb})")));
    }
    if !g.is_finite() || g.abs() > 1.0 + tol.cosine_clamp {
        return Err(Error::Domain(format!("cosine {g} violates |g| <= 1")));
    }
    let g = g.clamp(-1.0, 1.0);
    let radicand = fa * fa + fb * fb - 2.0 * fa * fb * g;
    if radicand < -1e-12 {
        return Err(Error::Numerical(format!("negative radicand {radicand:e}")));
    }
    Ok(DistanceValue { value: radicand.max(0.0).sqrt(), components: Some(Components { f_a: fa, f_b: fb, g }) })
}

/// Hilbert-Schmidt distance in polarized form.
pub fn d_hs(rho1: &DensityMatrix, rho2: &DensityMatrix, tol: &Tolerances) -> Result<DistanceValue> {
    let fa = f_hs(rho1, tol)?;
    let fb = f_hs(rho2, tol)?;
    let g = g_hs(rho1, rho2, tol)?;
    polarized_distance(fa, fb, g, tol)
}

/// Bures-Uhlmann distance `sqrt(2(1 - g_BU))`.
pub fn d_bu(rho1: &DensityMatrix, rho2: &DensityMatrix, tol: &Tolerances) -> Result<DistanceValue> {
    let (g, gap) = bures(rho1, rho2, tol)?;
    polarized_distance_gap(1.0, 1.0, g, gap, tol)
}

/// `arccos(g^τ)`.
pub fn angle_tau(g: f64, tau: f64, tol: &Tolerances) -> Result<f64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let g = clamp_cosine(g, tol)?;
    Ok(g.powf(tau).acos())
}

fn check_tau_at_least_one(tau: f64) -> Result<()> {
    if !(tau >= 1.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be finite and >= 1, got {tau}")));
    }
    Ok(())
}

/// `sqrt(2(1 - |<ψ₁|ψ₂>|^τ))`.
pub fn d_tau_pure(psi1: &PureState, psi2: &PureState, tau: f64, tol: &Tolerances) -> Result<DistanceValue> {
    check_tau_at_least_one(tau)?;
    let o = pure_overlap(psi1, psi2)?;
    let gap = gap_pow(pure_infidelity(psi1, psi2)? / (1.0 + o), tau);
    polarized_distance_gap(1.0, 1.0, clamp_cosine(o.powf(tau), tol)?, gap, tol)
}

/// `D₀ sqrt(1 - g^τ)`.
pub fn d_tau_bounded(g: f64, tau: f64, d0: f64, tol: &Tolerances) -> Result<DistanceValue> {
    check_tau_at_least_one(tau)?;
    if !(d0 > 0.0) || !d0.is_finite() {
        return Err(Error::Domain(format!("bound must be positive, got {d0}")));
    }
    let gt = clamp_cosine(g, tol)?.powf(tau);
    // equal polarizations D₀/√2 turn the polarized form into D₀ sqrt(1 - g)
    let f = d0 / std::f64::consts::SQRT_2;
    let mut v = polarized_distance(f, f, gt, tol)?;
    v.value = v.value.min(d0);
    Ok(v)
}

/// `2 - 2 g_BU`, the squared Bures-Uhlmann distance.
pub fn quasi_db(rho1: &DensityMatrix, rho2: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    Ok(2.0 * bures(rho1, rho2, tol)?.1)
}

/// 0 for the same element, 1 otherwise.
pub fn trivial_distance(same: bool) -> f64 {
    if same {
        0.0
    } else {
        1.0
    }
}
