use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "gd",
    version,
    about = "Garding eigenvalues, determinant majorization and related checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hyperbolicity, coefficient conditions and optional cone membership.
    Check(OperatorCmd),
    /// Seeded harness for F(A)^{1/N} >= gamma det(A)^{1/n}.
    Majorize(MajorizeCmd),
    /// Garding eigenvalues of --matrix with respect to --base (default I).
    Eigs(EigsCmd),
    /// Barrier derivative formulas, Guler inequality, discriminant identity.
    Barrier(BarrierCmd),
    /// Gradient at I, trace inequality and optional sphere search.
    CentralRay(CentralRayCmd),
    /// Prelevel bound, convexity and polar test for psi = <y, x> - log g(x).
    Exhaustion(ExhaustionCmd),
    /// The diagonal counterexample and the radial subsolution family.
    #[command(subcommand)]
    Counterexample(CounterexampleCmd),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Global {
    /// Number of seeded samples [default: 1000].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Base seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Numeric tolerance where a command uses one [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with defaults for the flags above; unknown fields are rejected.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OperatorArgs {
    /// Operator spec file (JSON).
    pub spec: Option<PathBuf>,
    /// Built-in operator: sigma-k, det, pfold, lagrangian-ma, counterexample.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long, value_enum)]
    pub field: Option<Field>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    /// Matrix file (JSON).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OperatorCmd {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug)]
pub struct MajorizeCmd {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[command(flatten)]
    pub global: Global,
    /// `identity`: gamma = F(I)^{1/N}; `unit`: gamma = 1.
    #[arg(long, value_enum, default_value_t = GammaArg::Identity)]
    pub gamma_mode: GammaArg,
}

#[derive(Args, Debug)]
pub struct EigsCmd {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[command(flatten)]
    pub global: Global,
    /// Base point A (default I).
    #[arg(long)]
    pub base: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BarrierCmd {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[command(flatten)]
    pub global: Global,
    /// Direction B; with --matrix A, checks that single pair instead of sampling.
    #[arg(long)]
    pub direction: Option<PathBuf>,
    /// Highest derivative order checked against finite differences.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Even order l of the Guler inequality (at most --order).
    #[arg(long, default_value_t = 2)]
    pub l: usize,
}

#[derive(Args, Debug)]
pub struct CentralRayCmd {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[command(flatten)]
    pub global: Global,
    /// Also maximize F^{1/N} over the unit sphere in the cone.
    #[arg(long)]
    pub search: bool,
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    /// Restrict the search to diagonal matrices.
    #[arg(long)]
    pub diagonal: bool,
}

#[derive(Args, Debug)]
pub struct ExhaustionCmd {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[command(flatten)]
    pub global: Global,
    /// Level c of the prelevel set.
    #[arg(long, default_value_t = 5.0)]
    pub c: f64,
    /// Point x at which psi is also reported.
    #[arg(long)]
    pub point: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum CounterexampleCmd {
    /// Ratio F^{1/3}/det^{1/2} at diag(s, 1) and the scan for a given gamma.
    Ratio {
        #[command(flatten)]
        global: Global,
        /// Extra values of s to report.
        #[arg(long)]
        s: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
    },
    /// Radial subsolution u_eps for F = a11^{N-1} (1/n) tr A.
    Pogorelov {
        #[command(flatten)]
        global: Global,
        #[arg(long = "N")]
        big_n: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Real,
    Complex,
    Quaternion,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaArg {
    Identity,
    Unit,
}
