//! Python bindings. States are passed as a list of complex amplitudes (pure)
//! or a nested list of complex entries (density matrix); reports come back as
//! plain dicts with the same layout as the command-line JSON.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use polardist::state::validate_density;
use polardist::verifier::conditions::AngleTriple;
use polardist::verifier::embedding::{build_pyramid, gram_determinant};
use polardist::verifier::tau::{scan_tau as scan, tau_grid};
use polardist::{
    check_axioms, load_states as parse_states, search_angle_counterexample, search_violation, ComplexMatrix, Cosine,
    DistanceSpec, Error, Measure, MetricKind, Polarization, PureState, QuantumState, SampleConfig, SearchTarget,
    Tolerances,
};

create_exception!(polardist, PolardistError, PyValueError);

fn err(e: Error) -> PyErr {
    PolardistError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr>(what: &str, s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| PolardistError::new_err(format!("bad {what} '{s}': {e}")))
}

fn tolerances(strict: bool) -> Tolerances {
    if strict {
        Tolerances::strict()
    } else {
        Tolerances::default()
    }
}

/// Round-trips a serializable report through `json.loads`.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(|e| PolardistError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn extract_state(obj: &Bound<'_, PyAny>, tol: &Tolerances) -> PyResult<QuantumState> {
    if let Ok(amps) = obj.extract::<Vec<Complex64>>() {
        return Ok(PureState::new(amps, tol).map_err(err)?.into());
    }
    let rows: Vec<Vec<Complex64>> = obj
        .extract()
        .map_err(|_| PolardistError::new_err("a state is a list of amplitudes or a square nested list"))?;
    let m = ComplexMatrix::from_rows(&rows).map_err(err)?;
    Ok(validate_density(m, tol).map_err(err)?.into())
}

fn sample_config(dim: usize, measure: &str, rank: Option<usize>, seed: u64, count: u64) -> PyResult<SampleConfig> {
    Ok(match parse::<Measure>("measure", measure)? {
        Measure::HaarPure => SampleConfig::haar(dim, seed, count),
        Measure::GinibreMixed => SampleConfig::ginibre(dim, rank.unwrap_or(dim), seed, count),
    })
}

/// A validated distance specification.
#[pyclass(module = "polardist", frozen)]
struct Distance {
    spec: DistanceSpec,
}

#[pymethods]
impl Distance {
    #[new]
    #[pyo3(signature = (metric, tau=None, d0=None, cosine=None, polarization=None))]
    fn new(
        metric: &str,
        tau: Option<f64>,
        d0: Option<f64>,
        cosine: Option<&str>,
        polarization: Option<&str>,
    ) -> PyResult<Self> {
        let mut spec = DistanceSpec::new(parse::<MetricKind>("metric", metric)?);
        if let Some(t) = tau {
            spec = spec.with_tau(t);
        }
        if let Some(b) = d0 {
            spec = spec.with_bound(b);
        }
        if let Some(c) = cosine {
            spec = spec.with_cosine(parse::<Cosine>("cosine", c)?);
        }
        if let Some(p) = polarization {
            spec = spec.with_polarization(parse::<Polarization>("polarization", p)?);
        }
        spec.validate().map_err(err)?;
        Ok(Self { spec })
    }

    /// Distance between two states.
    fn __call__(&self, a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>) -> PyResult<f64> {
        let tol = Tolerances::default();
        let (a, b) = (extract_state(a, &tol)?, extract_state(b, &tol)?);
        Ok(self.spec.distance(&a, &b, &tol).map_err(err)?.value)
    }

    /// Distance with its polarizations and cosine (None for non-polarized kinds).
    fn evaluate(&self, py: Python<'_>, a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        let tol = Tolerances::default();
        let (a, b) = (extract_state(a, &tol)?, extract_state(b, &tol)?);
        let e = self.spec.evaluate(&a, &b, &tol).map_err(err)?;
        let c = e.distance.components;
        let out = serde_json::json!({
            "distance": e.distance.value,
            "f_a": c.map(|c| c.f_a),
            "f_b": c.map(|c| c.f_b),
            "g": c.map(|c| c.g),
            "cosine": e.cosine,
        });
        to_py(py, &out)
    }

    /// Samples states and checks the metric axioms and angle conditions.
    #[pyo3(signature = (dim, samples=10_000, seed=1, measure="haar", rank=None, strict=false, jobs=0))]
    #[allow(clippy::too_many_arguments)]
    fn verify(
        &self,
        py: Python<'_>,
        dim: usize,
        samples: u64,
        seed: u64,
        measure: &str,
        rank: Option<usize>,
        strict: bool,
        jobs: usize,
    ) -> PyResult<PyObject> {
        let cfg = sample_config(dim, measure, rank, seed, samples)?;
        let tol = tolerances(strict);
        let spec = self.spec;
        let report = py.allow_threads(|| check_axioms(&spec, &cfg, &tol, jobs)).map_err(err)?;
        let mut value = serde_json::to_value(&report).map_err(|e| PolardistError::new_err(e.to_string()))?;
        value["summary"] = report.summary().into();
        to_py(py, &value)
    }

    /// Searches for a violation of the triangle inequality or an angle condition.
    #[pyo3(signature = (target, dim=2, budget=10_000, seed=1, measure="haar", rank=None, strict=false, jobs=0))]
    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        py: Python<'_>,
        target: &str,
        dim: usize,
        budget: u64,
        seed: u64,
        measure: &str,
        rank: Option<usize>,
        strict: bool,
        jobs: usize,
    ) -> PyResult<PyObject> {
        let target = parse::<SearchTarget>("target", target)?;
        let cfg = sample_config(dim, measure, rank, seed, budget)?;
        let tol = tolerances(strict);
        let spec = self.spec;
        let result = py.allow_threads(|| search_violation(&spec, &cfg, target, budget, &tol, jobs)).map_err(err)?;
        to_py(py, &result)
    }

    /// Distances between all pairs `(i, j)`, `i < j`, of a list of states.
    fn pairwise(&self, states: Vec<Bound<'_, PyAny>>) -> PyResult<Vec<(usize, usize, f64)>> {
        let tol = Tolerances::default();
        let states = states.iter().map(|s| extract_state(s, &tol)).collect::<PyResult<Vec<_>>>()?;
        pairs(&self.spec, &states, &tol)
    }

    #[getter]
    fn metric(&self) -> String {
        self.spec.kind.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Distance('{}')", self.spec.describe())
    }
}

fn pairs(spec: &DistanceSpec, states: &[QuantumState], tol: &Tolerances) -> PyResult<Vec<(usize, usize, f64)>> {
    let mut out = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            out.push((i, j, spec.distance(&states[i], &states[j], tol).map_err(err)?.value));
        }
    }
    Ok(out)
}

/// Pairwise distances among the states of a JSON state file.
#[pyfunction]
fn distances_from_file(distance: &Distance, text: &str) -> PyResult<Vec<(usize, usize, f64)>> {
    let tol = Tolerances::default();
    let states = parse_states(text, &tol).map_err(err)?;
    pairs(&distance.spec, &states, &tol)
}

/// Searches abstract cosine triples whose `sqrt(1 - g)` distances are
/// triangle-consistent but violate the simplified angle condition.
#[pyfunction]
#[pyo3(signature = (budget=10_000, seed=1))]
fn abstract_angle_search(py: Python<'_>, budget: u64, seed: u64) -> PyResult<PyObject> {
    let tol = Tolerances::default();
    let result = py.allow_threads(|| search_angle_counterexample(budget, seed, &tol)).map_err(err)?;
    to_py(py, &result)
}

/// `arccos(x^tau)` over a tau grid that always contains tau = 1.
#[pyfunction]
#[pyo3(signature = (xs, tau_min=0.01, tau_max=10.0, steps=200))]
fn scan_tau(py: Python<'_>, xs: Vec<f64>, tau_min: f64, tau_max: f64, steps: usize) -> PyResult<PyObject> {
    let taus = tau_grid(tau_min, tau_max, steps).map_err(err)?;
    to_py(py, &scan(&xs, &taus).map_err(err)?)
}

/// Realizes cosines `(g_ab, g_bc, g_ac)` as unit vectors and builds the pyramid
/// with edges `f`. Raises for triples with a negative Gram determinant.
#[pyfunction]
#[pyo3(signature = (g, f=[1.0, 1.0, 1.0]))]
fn realize(py: Python<'_>, g: [f64; 3], f: [f64; 3]) -> PyResult<PyObject> {
    let tol = Tolerances::default();
    let t = AngleTriple::from_cosines(g[0], g[1], g[2]).map_err(err)?;
    let pyramid = build_pyramid(f, g, &tol).map_err(err)?;
    let mut value = serde_json::to_value(pyramid).map_err(|e| PolardistError::new_err(e.to_string()))?;
    value["gram_determinant"] = gram_determinant(&t).into();
    to_py(py, &value)
}

#[pymodule]
#[pyo3(name = "polardist")]
fn polardist_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PolardistError", m.py().get_type_bound::<PolardistError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Distance>()?;
    m.add_function(wrap_pyfunction!(distances_from_file, m)?)?;
    m.add_function(wrap_pyfunction!(abstract_angle_search, m)?)?;
    m.add_function(wrap_pyfunction!(scan_tau, m)?)?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_module<R>(f: impl FnOnce(Python<'_>, &Bound<'_, PyModule>) -> R) -> R {
        pyo3::prepare_freethreaded_python();
        Python::with_gil(|py| {
            let m = PyModule::new_bound(py, "polardist").unwrap();
            polardist_py(&m).unwrap();
            f(py, &m)
        })
    }

    #[test]
    fn orthogonal_qubits_are_sqrt2_apart() {
        with_module(|py, m| {
            let d = m.getattr("Distance").unwrap().call1(("bu-pure",)).unwrap();
            let a = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)].into_py(py);
            let b = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)].into_py(py);
            let v: f64 = d.call1((a, b)).unwrap().extract().unwrap();
            assert!((v - std::f64::consts::SQRT_2).abs() < 1e-15);
        });
    }

    #[test]
    fn errors_surface_as_polardist_error() {
        with_module(|py, m| {
            let e = m.getattr("Distance").unwrap().call1(("tau-pure",)).unwrap_err();
            assert!(e.is_instance_of::<PolardistError>(py));
            let e = m.getattr("Distance").unwrap().call1(("nope",)).unwrap_err();
            assert!(e.is_instance_of::<PyValueError>(py));
        });
    }

    #[test]
    fn density_input_matches_pure_input() {
        with_module(|py, m| {
            let d = m.getattr("Distance").unwrap().call1(("bu",)).unwrap();
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let plus = vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
            let zero_rows = vec![
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            ];
            let v: f64 = d.call1((plus.into_py(py), zero_rows.into_py(py))).unwrap().extract().unwrap();
            // sqrt(2 - 2 |<0|+>|)
            assert!((v - (2.0 - std::f64::consts::SQRT_2).sqrt()).abs() < 1e-12);
        });
    }
}
