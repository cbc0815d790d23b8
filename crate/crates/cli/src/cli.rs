use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "primegap",
    version,
    about = "Prime gaps, residue-class coverings and certified composite runs"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gaps between consecutive primes up to a limit.
    Gaps(GapsArgs),
    /// Jacobsthal function of an integer or a primorial.
    Jacobsthal(JacobsthalArgs),
    /// Longest interval [1, y] coverable by one class per prime <= x.
    Ycover(YcoverArgs),
    /// Build a composite-run certificate from a covering assignment.
    Assemble(AssembleArgs),
    /// Verify a composite-run certificate.
    Check(CheckArgs),
    /// Run the four-stage sieve construction.
    Construct(ConstructArgs),
    /// Arithmetic constants and statistical checks.
    #[command(subcommand)]
    Stats(StatsCommand),
    /// Run a list of commands from a TOML file.
    Batch(BatchArgs),
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[arg(long)]
    pub limit: u64,
    /// Only gaps longer than every earlier gap.
    #[arg(long)]
    pub records: bool,
    /// Add merit columns.
    #[arg(long)]
    pub merits: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct JacobsthalArgs {
    /// Decimal integer.
    #[arg(long)]
    pub n: Option<String>,
    /// Use the product of all primes <= this bound.
    #[arg(long)]
    pub primorial: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoverMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Increasing,
    Decreasing,
}

#[derive(Debug, Args)]
pub struct YcoverArgs {
    #[arg(long)]
    pub x: u64,
    #[arg(long, value_enum, default_value_t = CoverMode::Exact)]
    pub mode: CoverMode,
    /// Node budget for the exact search.
    #[arg(long, default_value_t = primegap::covering::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    /// Prime order for the greedy cover.
    #[arg(long, value_enum, default_value_t = Order::Increasing)]
    pub order: Order,
    /// Write the witness assignment to this file.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    /// Assignment file `{"x": .., "classes": [{"p": .., "a": ..}]}`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub y: u64,
    /// Write the certificate to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub cert: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub y: Option<u64>,
    #[arg(long)]
    pub z: Option<u64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Relative band for the degree diagnostics.
    #[arg(long, default_value_t = primegap::construction::DEFAULT_BAND)]
    pub band: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the final assignment to this file.
    #[arg(long)]
    pub emit: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Partial product of the singular series.
    Alpha(AlphaArgs),
    /// Local factor of a form system, enumerated and in closed form.
    Beta(BetaArgs),
    /// Relation-graph degrees against their predictions.
    Degrees(DegreesArgs),
    /// Monte Carlo over random classes for a set of primes.
    Montecarlo(MonteCarloArgs),
    /// Count of z-smooth integers up to y.
    Smooth(SmoothArgs),
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub cutoff: u64,
    /// Second cutoff for a convergence check.
    #[arg(long)]
    pub fine_cutoff: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    /// progression_pair_d3, progression_d2, shifted_d3 or shifted_d2.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 0)]
    pub m: i64,
    #[arg(long, default_value_t = 0)]
    pub x: i64,
    /// Shift for the shifted kinds.
    #[arg(long, default_value_t = 0)]
    pub i: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Full,
    Strict,
}

#[derive(Debug, Args)]
pub struct DegreesArgs {
    #[arg(long)]
    pub r: u32,
    #[arg(long)]
    pub x: u64,
    #[arg(long)]
    pub y: u64,
    #[arg(long, value_enum)]
    pub side: SideArg,
    #[arg(long, default_value_t = 0)]
    pub i: u32,
    #[arg(long, value_enum, default_value_t = RelationArg::Full)]
    pub relation: RelationArg,
    /// Accept y outside [x sqrt(log x), x log x].
    #[arg(long)]
    pub allow_outside_regime: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum TargetArg {
    SurvivorCount,
    PairSurvival,
    ApSurvival,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long, value_enum)]
    pub target: TargetArg,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated primes carrying random classes.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["x", "z"])]
    pub primes: Option<Vec<u64>>,
    /// Take the primes in (log x, z] instead.
    #[arg(long, requires = "z")]
    pub x: Option<u64>,
    #[arg(long, requires = "x")]
    pub z: Option<u64>,
    /// First element of the survivor-count range.
    #[arg(long, default_value_t = 1)]
    pub from: u64,
    /// Last element of the survivor-count range.
    #[arg(long, default_value_t = 1000)]
    pub to: u64,
    #[arg(long, default_value_t = 1)]
    pub q1: u64,
    #[arg(long, default_value_t = 3)]
    pub q2: u64,
    #[arg(long, default_value_t = 1)]
    pub start: u64,
    #[arg(long, default_value_t = 2)]
    pub step: u64,
    #[arg(long, default_value_t = 2)]
    pub len: u32,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    #[arg(long)]
    pub y: u64,
    #[arg(long)]
    pub z: u64,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Write the aggregate to this file as well.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
