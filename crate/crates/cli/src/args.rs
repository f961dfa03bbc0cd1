use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "harmonet", version, about = "Harmonic functions, potentials and random walks on weighted networks")]
pub struct Cli {
    /// Worker threads for Monte-Carlo runs.
    #[arg(long, global = true, env = "HARMONET_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the neighbor oracle on a ball: symmetry, positivity, no loops.
    Validate(ValidateArgs),
    /// Level-by-level harmonic extension on a Bratteli diagram.
    Harmonic(HarmonicArgs),
    /// Dipole v_xy with Δv = δ_x − δ_y.
    Dipole(DipoleArgs),
    /// Monopole w_x with Δw = δ_x.
    Monopole(MonopoleArgs),
    /// Multipole with Δv = δ_{x0} − Σ α_i δ_{x_i}.
    Multipole(MultipoleArgs),
    /// Truncated Green series Σ p⁽ⁿ⁾(x,y).
    Green(GreenArgs),
    /// Hitting and return probabilities, Green identities, the matrix D.
    Hitting(HittingArgs),
    /// Transient/recurrent classification by three estimators.
    Transience(TransienceArgs),
    /// Energy of a closed-form function by radius, or the level lower bound.
    Energy(EnergyArgs),
    /// Interior and boundary sums of the Gauss-Green identity.
    GaussGreen(GaussGreenArgs),
    /// Existence of harmonic functions on a diagram, or leveling of a graph.
    BratteliCheck(BratteliCheckArgs),
    /// Adjointness, contractivity and conductance identities of a transfer system.
    TransferCheck(TransferCheckArgs),
    /// List fixtures or export their closed forms.
    Fixtures(FixturesArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Harmonic(_) => "harmonic",
            Command::Dipole(_) => "dipole",
            Command::Monopole(_) => "monopole",
            Command::Multipole(_) => "multipole",
            Command::Green(_) => "green",
            Command::Hitting(_) => "hitting",
            Command::Transience(_) => "transience",
            Command::Energy(_) => "energy",
            Command::GaussGreen(_) => "gauss-green",
            Command::BratteliCheck(_) => "bratteli-check",
            Command::TransferCheck(_) => "transfer-check",
            Command::Fixtures(_) => "fixtures",
        }
    }
}

/// Where the network comes from.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SourceArgs {
    /// Network spec file (JSON).
    #[arg(long, conflicts_with_all = ["fixture", "diagram"])]
    pub network: Option<PathBuf>,
    /// Diagram spec file (JSON).
    #[arg(long, conflicts_with = "fixture")]
    pub diagram: Option<PathBuf>,
    /// Named fixture; see `harmonet fixtures --list`.
    #[arg(long)]
    pub fixture: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Lattice dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Depth of diagram fixtures.
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Result file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Two-column plot data (x value).
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct McArgs {
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Required for every Monte-Carlo run.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Linear solves on finite windows.
    Potential,
    /// Monte-Carlo random walks.
    Walk,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TruncationArg {
    Grounded,
    Free,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyArg {
    Conductance,
    Arrow,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Ball center; defaults to the origin.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub radius: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HarmonicArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// f on V_0, comma separated; defaults to zero.
    #[arg(long)]
    pub f0: Option<String>,
    /// f on V_1; without it the command searches for any nonzero solution.
    #[arg(long)]
    pub f1: Option<String>,
    /// Last level to compute.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, value_enum, default_value_t = AssemblyArg::Conductance)]
    pub assembly: AssemblyArg,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Level-function CSV (level,index,value).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DipoleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Exhaustion radii, comma separated.
    #[arg(long, default_value = "2,4,8,16,32")]
    pub radii: String,
    #[arg(long, value_enum, default_value_t = TruncationArg::Grounded)]
    pub truncation: TruncationArg,
    #[arg(long, value_enum, default_value_t = Method::Potential)]
    pub method: Method,
    /// Evaluation radius for the walk method.
    #[arg(long, default_value_t = 2)]
    pub eval_radius: usize,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MonopoleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub x: String,
    #[arg(long, default_value = "2,4,8,16,32")]
    pub radii: String,
    #[arg(long, value_enum, default_value_t = Method::Potential)]
    pub method: Method,
    #[arg(long, default_value_t = 2)]
    pub eval_radius: usize,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MultipoleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub x0: String,
    /// Sink `vertex=weight`; repeat for each sink. Weights sum to 1.
    #[arg(long = "sink", required = true)]
    pub sinks: Vec<String>,
    #[arg(long, default_value = "2,4,8,16,32")]
    pub radii: String,
    #[arg(long, value_enum, default_value_t = TruncationArg::Grounded)]
    pub truncation: TruncationArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GreenArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Number of steps.
    #[arg(long = "N", default_value_t = 1000)]
    pub n: usize,
    /// Window radius around x; defaults to N+1.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Largest window materialized.
    #[arg(long, default_value_t = 2_000_000)]
    pub max_vertices: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct HittingArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// Also estimate the 2×2 matrix D for {x, y}.
    #[arg(long)]
    pub d_matrix: bool,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TransienceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Start vertex; defaults to the origin.
    #[arg(long)]
    pub x: Option<String>,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Closed form attached to the fixture.
    #[arg(long)]
    pub form: String,
    #[arg(long, default_value = "2,4,8,16")]
    pub radii: String,
    /// Level lower bound up to level N (diagram fixtures).
    #[arg(long)]
    pub bound: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GaussGreenArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Closed form for u, or `random`.
    #[arg(long)]
    pub u: String,
    /// Closed form for v, or `random`; defaults to u.
    #[arg(long)]
    pub v: Option<String>,
    #[arg(long, default_value = "2,4,8,16")]
    pub radii: String,
    /// Seed for random test functions.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BratteliCheckArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Levels to test.
    #[arg(long = "check-depth")]
    pub check_depth: Option<usize>,
    /// Leveling root for plain networks; defaults to the origin.
    #[arg(long)]
    pub root: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TransferCheckArgs {
    /// Transfer spec file (JSON).
    #[arg(long, conflicts_with = "pascal_binomial")]
    pub transfer: Option<PathBuf>,
    /// Pascal graph with R rows (½, ½) to this depth.
    #[arg(long)]
    pub pascal_binomial: Option<usize>,
    /// Random vectors per level.
    #[arg(long, default_value_t = 100)]
    pub vectors: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FixturesArgs {
    #[arg(long)]
    pub list: bool,
    /// Fixture to describe or export.
    #[arg(long)]
    pub name: Option<String>,
    /// Export closed forms on the ball of this radius as CSV.
    #[arg(long)]
    pub csv: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}
