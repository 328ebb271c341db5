//! Composable distance specifications.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::functionals::{
    bures, clamp_cosine, d_tau_bounded, f_hs, g_hs, gap_pow, polarized_distance_gap, pure_infidelity, pure_overlap,
    DistanceValue,
};
use crate::sampling::Measure;
use crate::state::{DensityMatrix, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Hs,
    Bu,
    HsPure,
    BuPure,
    TauPure,
    TauBounded,
    QuasiDb,
    Trivial,
    CustomPolarized,
}

impl MetricKind {
    pub const ALL: [MetricKind; 9] = [
        Self::Hs,
        Self::Bu,
        Self::HsPure,
        Self::BuPure,
        Self::TauPure,
        Self::TauBounded,
        Self::QuasiDb,
        Self::Trivial,
        Self::CustomPolarized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Hs => "hs",
            Self::Bu => "bu",
            Self::HsPure => "hs-pure",
            Self::BuPure => "bu-pure",
            Self::TauPure => "tau-pure",
            Self::TauBounded => "tau-bounded",
            Self::QuasiDb => "quasi-db",
            Self::Trivial => "trivial",
            Self::CustomPolarized => "custom-polarized",
        }
    }

    pub fn uses_tau(self) -> bool {
        matches!(self, Self::TauPure | Self::TauBounded)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Domain(format!("unknown metric '{s}'")))
    }
}

/// Polarization functional `f(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarization {
    Unit,
    HsNorm,
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "hs-norm" => Ok(Self::HsNorm),
            other => Err(Error::Domain(format!("unknown polarization '{other}'"))),
        }
    }
}

/// Cosine functional `g(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cosine {
    Hs,
    Bu,
    PureOverlap,
    PureOverlapSquared,
}

impl Cosine {
    pub fn requires_pure(self) -> bool {
        matches!(self, Self::PureOverlap | Self::PureOverlapSquared)
    }
}

impl FromStr for Cosine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hs" => Ok(Self::Hs),
            "bu" => Ok(Self::Bu),
            "pure-overlap" => Ok(Self::PureOverlap),
            "pure-overlap-squared" => Ok(Self::PureOverlapSquared),
            other => Err(Error::Domain(format!("unknown cosine '{other}'"))),
        }
    }
}

/// A distance on quantum states, described by its kind and parameters.
///
/// `tau` only matters for the tau families, `bound` (D₀) only for
/// `tau-bounded`, and `polarization`/`cosine` only for `custom-polarized`
/// (plus `cosine` as the base functional of `tau-bounded`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSpec {
    pub kind: MetricKind,
    pub tau: Option<f64>,
    pub bound: f64,
    pub polarization: Polarization,
    pub cosine: Cosine,
}

/// Distance and the cosine whose arccos feeds the angle conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub distance: DistanceValue,
    pub cosine: f64,
    /// `1 - cosine`, kept separately because it loses precision near coincidence.
    pub gap: f64,
}

impl DistanceSpec {
    pub fn new(kind: MetricKind) -> Self {
        let (polarization, cosine) = match kind {
            MetricKind::Hs => (Polarization::HsNorm, Cosine::Hs),
            MetricKind::HsPure => (Polarization::Unit, Cosine::PureOverlapSquared),
            MetricKind::BuPure | MetricKind::TauPure => (Polarization::Unit, Cosine::PureOverlap),
            _ => (Polarization::Unit, Cosine::Bu),
        };
        Self { kind, tau: None, bound: std::f64::consts::SQRT_2, polarization, cosine }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_cosine(mut self, cosine: Cosine) -> Self {
        self.cosine = cosine;
        self
    }

    pub fn with_polarization(mut self, polarization: Polarization) -> Self {
        self.polarization = polarization;
        self
    }

    pub fn tau_pure(tau: f64) -> Self {
        Self::new(MetricKind::TauPure).with_tau(tau)
    }

    pub fn tau_bounded(tau: f64, bound: f64, cosine: Cosine) -> Self {
        Self::new(MetricKind::TauBounded).with_tau(tau).with_bound(bound).with_cosine(cosine)
    }

    pub fn custom(polarization: Polarization, cosine: Cosine) -> Self {
        Self::new(MetricKind::CustomPolarized).with_polarization(polarization).with_cosine(cosine)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.uses_tau() {
            match self.tau {
                Some(t) if t.is_finite() && t >= 1.0 => {}
                Some(t) => return Err(Error::Domain(format!("{} requires tau >= 1, got {t}", self.kind))),
                None => return Err(Error::Domain(format!("{} requires a tau parameter", self.kind))),
            }
        }
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(Error::Domain(format!("bound must be positive, got {}", self.bound)));
        }
        Ok(())
    }

    /// Whether the metric is only defined on state vectors.
    pub fn requires_pure(&self) -> bool {
        match self.kind {
            MetricKind::HsPure | MetricKind::BuPure | MetricKind::TauPure => true,
            MetricKind::TauBounded | MetricKind::CustomPolarized => self.cosine.requires_pure(),
            _ => false,
        }
    }

    pub fn check_measure(&self, measure: Measure) -> Result<()> {
        if self.requires_pure() && measure != Measure::HaarPure {
            return Err(Error::Incompatible(format!(
                "metric {} needs pure states, got measure {measure}",
                self.describe()
            )));
        }
        Ok(())
    }

    /// Short human-readable description, e.g. `tau-pure(tau=2)`.
    pub fn describe(&self) -> String {
        match self.kind {
            MetricKind::TauPure => format!("tau-pure(tau={})", self.tau.unwrap_or(f64::NAN)),
            MetricKind::TauBounded => format!(
                "tau-bounded(tau={}, d0={}, cosine={})",
                self.tau.unwrap_or(f64::NAN),
                self.bound,
                cosine_name(self.cosine)
            ),
            MetricKind::CustomPolarized => format!(
                "custom-polarized(f={}, g={})",
                match self.polarization {
                    Polarization::Unit => "unit",
                    Polarization::HsNorm => "hs-norm",
                },
                cosine_name(self.cosine)
            ),
            k => k.name().to_string(),
        }
    }

    /// Distance between two states.
    pub fn distance(&self, a: &QuantumState, b: &QuantumState, tol: &Tolerances) -> Result<DistanceValue> {
        Ok(self.evaluate(a, b, tol)?.distance)
    }

    /// Distance plus the cosine used by the angle conditions.
    ///
    /// Polarized kinds report their own `g` (raised to `tau` for the tau
    /// families). `quasi-db` and `trivial` are not polarized; they report the
    /// cosine implied by their bounded form `g = 1 - D²/D₀²` with `D₀` equal
    /// to their supremum (2 and 1).
    pub fn evaluate(&self, a: &QuantumState, b: &QuantumState, tol: &Tolerances) -> Result<Evaluation> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(a.dim(), b.dim()));
        }
        // bitwise-equal inputs are exactly coincident; anything else is computed
        let raw = |c: Cosine| if a == b { Ok((1.0, 0.0)) } else { self.raw_cosine(c, a, b, tol) };
        match self.kind {
            MetricKind::QuasiDb => {
                let (_, gap) = raw(Cosine::Bu)?;
                let d = 2.0 * gap;
                let gap_out = d * d / 4.0;
                Ok(Evaluation { distance: DistanceValue::bare(d), cosine: 1.0 - gap_out, gap: gap_out })
            }
            MetricKind::Trivial => {
                let d = crate::functionals::trivial_distance(a.same_state(b, tol)?);
                Ok(Evaluation { distance: DistanceValue::bare(d), cosine: 1.0 - d * d, gap: d * d })
            }
            MetricKind::TauBounded => {
                let tau = self.tau.ok_or_else(|| Error::Domain("tau-bounded requires tau".into()))?;
                let (g, gap) = raw(self.cosine)?;
                let mut distance = d_tau_bounded(g, tau, self.bound, tol)?;
                let gt = gap_pow(gap, tau);
                distance.value = (self.bound * gt.sqrt()).min(self.bound);
                Ok(Evaluation { distance, cosine: g.powf(tau), gap: gt })
            }
            _ => {
                let (mut g, mut gap) = raw(self.cosine)?;
                if self.kind == MetricKind::TauPure {
                    let tau = self.tau.ok_or_else(|| Error::Domain("tau-pure requires tau".into()))?;
                    g = clamp_cosine(g.powf(tau), tol)?;
                    gap = gap_pow(gap, tau);
                }
                let (fa, fb) = match self.polarization {
                    Polarization::Unit => (1.0, 1.0),
                    Polarization::HsNorm => (polarization_hs(a, tol)?, polarization_hs(b, tol)?),
                };
                let distance = polarized_distance_gap(fa, fb, g, gap, tol)?;
                Ok(Evaluation { distance, cosine: g, gap })
            }
        }
    }

    /// Cosine `g` and `1 - g`; the pure and Bures routes compute the latter without cancellation.
    fn raw_cosine(&self, cosine: Cosine, a: &QuantumState, b: &QuantumState, tol: &Tolerances) -> Result<(f64, f64)> {
        let pure = match (a.as_pure(), b.as_pure()) {
            (Some(pa), Some(pb)) => Some((pa, pb)),
            _ => None,
        };
        if let Some((pa, pb)) = pure {
            let o = pure_overlap(pa, pb)?;
            let s2 = pure_infidelity(pa, pb)?;
            return Ok(match cosine {
                // on pure states the Bures cosine reduces to the overlap
                Cosine::PureOverlap | Cosine::Bu => (o, s2 / (1.0 + o)),
                Cosine::PureOverlapSquared | Cosine::Hs => (o * o, s2),
            });
        }
        let g = match cosine {
            Cosine::PureOverlap | Cosine::PureOverlapSquared => {
                return Err(Error::Incompatible(format!("metric {} is defined on pure states only", self.describe())))
            }
            Cosine::Bu => return bures(&density(a), &density(b), tol),
            Cosine::Hs => g_hs(&density(a), &density(b), tol)?,
        };
        Ok((g, 1.0 - g))
    }
}

fn polarization_hs(s: &QuantumState, tol: &Tolerances) -> Result<f64> {
    match s {
        QuantumState::Pure(_) => Ok(1.0),
        QuantumState::Mixed(m) => f_hs(m, tol),
    }
}

fn density(s: &QuantumState) -> DensityMatrix {
    s.to_density()
}

fn cosine_name(c: Cosine) -> &'static str {
    match c {
        Cosine::Hs => "hs",
        Cosine::Bu => "bu",
        Cosine::PureOverlap => "pure-overlap",
        Cosine::PureOverlapSquared => "pure-overlap-squared",
    }
}

impl fmt::Display for DistanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{d_bu, d_hs, quasi_db};
    use crate::sampling::SampleConfig;
    use crate::state::{bloch_pure, pure_to_density, PureState};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn tau_kinds_validate_tau() {
        assert!(DistanceSpec::new(MetricKind::TauPure).validate().is_err());
        assert!(DistanceSpec::tau_pure(0.5).validate().is_err());
        assert!(DistanceSpec::tau_pure(1.0).validate().is_ok());
        assert!(DistanceSpec::new(MetricKind::Bu).with_bound(0.0).validate().is_err());
    }

    #[test]
    fn pure_kinds_reject_mixed_input() {
        let a: QuantumState = DensityMatrix::maximally_mixed(2).into();
        let b: QuantumState = PureState::basis(2, 0).into();
        let spec = DistanceSpec::new(MetricKind::BuPure);
        assert!(matches!(spec.distance(&a, &b, &tol()), Err(Error::Incompatible(_))));
        assert!(spec.check_measure(Measure::GinibreMixed).is_err());
        assert!(DistanceSpec::new(MetricKind::Bu).check_measure(Measure::HaarPure).is_ok());
    }

    #[test]
    fn pure_and_mixed_routes_agree() {
        let cfg = SampleConfig::haar(3, 3, 20);
        for i in 0..10u64 {
            let a = cfg.sample(2 * i, &tol()).unwrap();
            let b = cfg.sample(2 * i + 1, &tol()).unwrap();
            let (pa, pb) = (a.to_density(), b.to_density());
            let bu = DistanceSpec::new(MetricKind::Bu).distance(&a, &b, &tol()).unwrap().value;
            assert_abs_diff_eq!(bu, d_bu(&pa, &pb, &tol()).unwrap().value, epsilon = 1e-10);
            let hs = DistanceSpec::new(MetricKind::Hs).distance(&a, &b, &tol()).unwrap().value;
            assert_abs_diff_eq!(hs, d_hs(&pa, &pb, &tol()).unwrap().value, epsilon = 1e-10);
            let hs_pure = DistanceSpec::new(MetricKind::HsPure).distance(&a, &b, &tol()).unwrap().value;
            assert_abs_diff_eq!(hs, hs_pure, epsilon = 1e-10);
            let q = DistanceSpec::new(MetricKind::QuasiDb).distance(&a, &b, &tol()).unwrap().value;
            assert_abs_diff_eq!(q, quasi_db(&pa, &pb, &tol()).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn identical_states_have_zero_distance() {
        let cfg = SampleConfig::ginibre(3, 3, 1, 4);
        let a = cfg.sample(0, &tol()).unwrap();
        for kind in [MetricKind::Hs, MetricKind::Bu, MetricKind::QuasiDb, MetricKind::Trivial] {
            assert_eq!(DistanceSpec::new(kind).distance(&a, &a, &tol()).unwrap().value, 0.0, "{kind}");
        }
    }

    #[test]
    fn trivial_and_quasi_implied_cosines() {
        let a: QuantumState = bloch_pure(0.0, 0.0).into();
        let b: QuantumState = bloch_pure(PI / 2.0, 0.0).into();
        let t = DistanceSpec::new(MetricKind::Trivial).evaluate(&a, &b, &tol()).unwrap();
        assert_eq!((t.distance.value, t.cosine), (1.0, 0.0));
        let q = DistanceSpec::new(MetricKind::QuasiDb).evaluate(&a, &b, &tol()).unwrap();
        assert_abs_diff_eq!(q.distance.value, 2.0 - 2.0 * 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn tau_bounded_uses_base_cosine() {
        let a: QuantumState = pure_to_density(&bloch_pure(0.0, 0.0)).into();
        let b: QuantumState = pure_to_density(&bloch_pure(2.0 * 0.5f64.acos(), 0.0)).into();
        let spec = DistanceSpec::tau_bounded(2.0, 1.0, Cosine::Bu);
        let e = spec.evaluate(&a, &b, &tol()).unwrap();
        assert_abs_diff_eq!(e.distance.value, 0.75f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(e.cosine, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn parse_names() {
        for k in MetricKind::ALL {
            assert_eq!(k.name().parse::<MetricKind>().unwrap(), k);
        }
        assert!("nope".parse::<MetricKind>().is_err());
    }
}
