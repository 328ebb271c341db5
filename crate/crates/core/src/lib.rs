//! Polarized distances between quantum states and numerical checks of their
//! metric axioms.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod functionals;
pub mod metric;
pub mod numerics;
pub mod sampling;
pub mod state;
pub mod statefile;
pub mod verifier;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use metric::{Cosine, DistanceSpec, Evaluation, MetricKind, Polarization};
pub use numerics::ComplexMatrix;
pub use sampling::{Measure, SampleConfig};
pub use state::{DensityMatrix, PureState, QuantumState};
pub use statefile::{load_states, StateFile, StateRecord};
pub use verifier::axioms::{check_axioms, AxiomReport, Classification};
pub use verifier::search::{search_angle_counterexample, search_violation, SearchResult, SearchTarget};
