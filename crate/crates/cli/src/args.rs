//! Command-line flags. Every argument struct doubles as the manifest parameter
//! record, so a report can be replayed from its own `params`. Output paths and
//! worker counts do not affect results and are left out of the record.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use polardist::{Cosine, Measure, MetricKind, Polarization};

#[derive(Debug, Parser)]
#[command(name = "polardist", version, about = "Polarized distances between quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise distances among the states in a state file.
    Compute(ComputeArgs),
    /// Sample states and check the metric axioms and angle conditions.
    Verify(VerifyArgs),
    /// Search for a violation of the triangle inequality or an angle condition.
    Search(SearchArgs),
    /// Tabulate arccos(x^tau) over a tau grid.
    ScanTau(ScanTauArgs),
    /// Finite-difference probe of the tau-monotonicity of arccos(x^tau).
    ProbeTau(ProbeTauArgs),
    /// Realize an angle triple as three unit vectors and build the distance pyramid.
    Realize(RealizeArgs),
    /// Re-run the manifest of a JSON report and compare the numeric content.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TolProfile {
    Default,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Triangle,
    AngleEq5,
    AngleEq6,
    AbstractAngle,
}

/// Flags that select a distance.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MetricArgs {
    #[arg(long)]
    pub metric: MetricKind,
    /// Exponent of the tau families.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Bound D0 of the tau-bounded family.
    #[arg(long)]
    pub d0: Option<f64>,
    /// Base cosine for tau-bounded and custom-polarized.
    #[arg(long)]
    pub cosine: Option<Cosine>,
    /// Polarization for custom-polarized.
    #[arg(long)]
    pub polarization: Option<Polarization>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ComputeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    #[arg(long)]
    pub states: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
    #[arg(long)]
    #[serde(skip, default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "haar")]
    pub measure: Measure,
    /// Ginibre rank; defaults to the dimension.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, value_enum, default_value = "default")]
    pub tol_profile: TolProfile,
    #[arg(long)]
    #[serde(skip, default)]
    pub report: Option<PathBuf>,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    #[serde(skip, default)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    #[arg(long, default_value = "bu-pure")]
    pub metric: MetricKind,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub d0: Option<f64>,
    #[arg(long)]
    pub cosine: Option<Cosine>,
    #[arg(long)]
    pub polarization: Option<Polarization>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value = "haar")]
    pub measure: Measure,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "default")]
    pub tol_profile: TolProfile,
    #[arg(long)]
    #[serde(skip, default)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    #[serde(skip, default)]
    pub jobs: usize,
}

impl SearchArgs {
    pub fn metric_args(&self) -> MetricArgs {
        MetricArgs {
            metric: self.metric,
            tau: self.tau,
            d0: self.d0,
            cosine: self.cosine,
            polarization: self.polarization,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanTauArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.9,0.6,0.2")]
    pub x: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    #[arg(long)]
    #[serde(skip, default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProbeTauArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub x: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub tau_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    /// Admissible (x, y, z) triples checked for crossings.
    #[arg(long, default_value_t = 10_000)]
    pub crossing_samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip, default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RealizeArgs {
    /// Angles (phi_ab, phi_bc, phi_ac) in radians.
    #[arg(long, value_delimiter = ',', conflicts_with = "g", required_unless_present = "g")]
    pub angles: Option<Vec<f64>>,
    /// Cosines (g_ab, g_bc, g_ac).
    #[arg(long, value_delimiter = ',')]
    pub g: Option<Vec<f64>>,
    /// Polarizations (f_a, f_b, f_c).
    #[arg(long, value_delimiter = ',', default_value = "1,1,1")]
    pub f: Vec<f64>,
    #[arg(long)]
    #[serde(skip, default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// JSON report written by compute, verify, search, scan-tau or realize.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}
