use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mushy::rational::parse_rational;
use mushy::Rational;

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "mushy", version, about = "Minimizing-movement flow of lattice rectangles with weak inclusions")]
pub struct Cli {
    /// Worker threads for the parallel scans.
    #[arg(long, global = true, env = "MUSHY_WORKERS")]
    pub workers: Option<usize>,

    /// JSON document `{"command": ..., "<flag>": value, ...}` used instead of command-line flags.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical side lengths and regime of a parameter set.
    Thresholds(ThresholdsArgs),
    /// Discrete evolution of a rectangle.
    SimulateDiscrete(DiscreteArgs),
    /// Continuum side-length evolution.
    SimulateLimit(LimitArgs),
    /// Exhaustive minimization of one step from a rectangle or a site list.
    Oracle(OracleArgs),
    /// Exact comparison of the closed forms with lattice evaluation.
    AlgebraCheck(AlgebraArgs),
    /// Discrete-to-continuum errors over a list of lattice spacings.
    Convergence(ConvergenceArgs),
    /// Predicted against searched displacements over a parameter grid.
    Sweep(SweepArgs),
    /// Markdown report of thresholds, displacements and, optionally, convergence.
    Report(ReportArgs),
}

/// Model parameters. `gamma` may replace `tau`; when all three of `eps`, `tau` and `gamma`
/// are given they must satisfy `gamma = tau / eps` exactly.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, value_parser = rational)]
    pub alpha: Rational,
    #[arg(long, value_parser = rational)]
    pub beta: Rational,
    #[arg(long, value_parser = rational)]
    pub gamma: Option<Rational>,
    #[arg(long, value_parser = rational)]
    pub eps: Option<Rational>,
    #[arg(long, value_parser = rational)]
    pub tau: Option<Rational>,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output file; `.csv` or `.json` (`.md` for reports). Standard output gets JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Condo {
    /// Reject spacings that leave a fractional cell on the shorter side.
    Strict,
    Loose,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long = "L1", value_parser = rational)]
    pub l1: Rational,
    #[arg(long = "L2", value_parser = rational)]
    pub l2: Rational,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Step solver (`direct`, `direct-full`, `closed-form`).
    #[arg(long, default_value = "closed-form")]
    pub solver: String,
    #[arg(long, value_enum, default_value_t = Condo::Loose)]
    pub condo: Condo,
    /// Cross-check every step between the lattice and closed-form solvers.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long = "L1")]
    pub l1: f64,
    #[arg(long = "L2")]
    pub l2: f64,
    #[arg(long = "T")]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Velocity law (`auto`, `floor-retain`, `floor-dissolve`, `infinite-gamma`, `crystalline`).
    #[arg(long, default_value = "auto")]
    pub law: String,
    #[arg(long)]
    pub vanish_tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Previous set `[0, width] x [0, height]`.
    #[arg(long, requires = "height", conflicts_with = "sites")]
    pub width: Option<i64>,
    #[arg(long, requires = "width")]
    pub height: Option<i64>,
    /// Previous set as a JSON site list or `i1 i2` lines.
    #[arg(long)]
    pub sites: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub collar: u32,
    /// Branch and bound instead of full enumeration (used automatically past the
    /// enumeration limit).
    #[arg(long)]
    pub prune: bool,
    #[arg(long, default_value_t = 4096)]
    pub max_listed: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    None,
    OmitRho1,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long = "L1", value_parser = rational)]
    pub l1: Rational,
    #[arg(long = "L2", value_parser = rational)]
    pub l2: Rational,
    /// Largest index compared in each direction.
    #[arg(long = "box", default_value_t = 6)]
    pub max_index: u64,
    #[arg(long, value_enum, default_value_t = FaultArg::None)]
    pub fault: FaultArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_parser = rational)]
    pub alpha: Rational,
    #[arg(long, value_parser = rational)]
    pub beta: Rational,
    #[arg(long, value_parser = rational)]
    pub gamma: Rational,
    #[arg(long = "L1", value_parser = rational)]
    pub l1: Rational,
    #[arg(long = "L2", value_parser = rational)]
    pub l2: Rational,
    /// Comma-separated decreasing spacings, e.g. `1/50,1/100,1/200`.
    #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
    pub eps_list: Vec<Rational>,
    #[arg(long = "T")]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 200)]
    pub probes: usize,
    #[arg(long, default_value = "closed-form")]
    pub solver: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
    pub alphas: Vec<Rational>,
    #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
    pub betas: Vec<Rational>,
    #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
    pub gammas: Vec<Rational>,
    /// Vertical side lengths.
    #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
    pub lengths: Vec<Rational>,
    /// Fixed horizontal side; squares when absent.
    #[arg(long, value_parser = rational)]
    pub other: Option<Rational>,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    #[arg(long, default_value = "closed-form")]
    pub solver: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Add a convergence study of the square with this side, for the first parameter triple.
    #[arg(long = "L0", value_parser = rational, requires = "eps_list")]
    pub l0: Option<Rational>,
    #[arg(long, value_parser = rational, value_delimiter = ',')]
    pub eps_list: Option<Vec<Rational>>,
    #[arg(long = "T", default_value_t = 0.05)]
    pub t_end: f64,
}
