use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Prune trajectory datasets by maximizing the entropy of their waypoint
/// distribution over a spatial grid.
#[derive(Parser, Debug)]
#[command(name = "trajprune", author, version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Prune a dataset and write the retained trajectories plus a report.
    Prune(PruneArgs),
    /// Print entropy statistics of a dataset.
    Stats(StatsArgs),
    /// Compare entropy and random pruning over several ratios and seeds.
    Compare(CompareArgs),
    /// Generate a synthetic dataset.
    Gen(GenArgs),
    /// Filter a JSONL stream from stdin, echoing accepted records to stdout.
    Filter(FilterArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Grid cell size in meters.
    #[arg(long, default_value_t = trajprune::grid::DEFAULT_CELL_SIZE)]
    pub cell_size: f64,

    /// Heading bins (0 = ignore heading).
    #[arg(long, default_value_t = 0)]
    pub heading_bins: u32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Entropy,
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Jsonl,
    Csv,
}

impl From<FormatArg> for trajprune::io::Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => trajprune::io::Format::Jsonl,
            FormatArg::Csv => trajprune::io::Format::Csv,
        }
    }
}

/// KL smoothing floor: a probability, or `default` for half a pseudo-count
/// of the pruned histogram.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Epsilon {
    Value(f64),
    HalfCount,
}

fn parse_epsilon(s: &str) -> Result<Epsilon, String> {
    if s == "default" {
        return Ok(Epsilon::HalfCount);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(Epsilon::Value(v)),
        _ => Err(format!("`{s}` is not a non-negative number or `default`")),
    }
}

pub fn parse_ratio(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        Ok(v) => Err(format!("{v} is outside the open interval (0, 1)")),
        Err(_) => Err(format!("`{s}` is not a number")),
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("`{s}` is not a positive integer")),
    }
}

#[derive(Args, Debug)]
pub struct PruneArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long)]
    pub output: PathBuf,

    /// Fraction of trajectories to remove, in (0, 1).
    #[arg(long, value_parser = parse_ratio)]
    pub ratio: f64,

    #[arg(long, value_enum, default_value_t = Method::Entropy)]
    pub method: Method,

    #[command(flatten)]
    pub grid: GridArgs,

    /// Candidates scored per batch [default: max(1024, n/1000), at most n/4].
    #[arg(long, value_parser = parse_positive)]
    pub batch_size: Option<usize>,

    /// Size of the random seed subset [default: batch size, at most the budget].
    #[arg(long, value_parser = parse_positive)]
    pub initial_size: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Write retained ids, one per line, in acceptance order.
    #[arg(long)]
    pub ids_out: Option<PathBuf>,

    /// Worker threads for candidate scoring; never changes the output.
    #[arg(long, default_value_t = 1, value_parser = parse_positive)]
    pub threads: usize,

    /// KL smoothing floor for the report (0 reports divergence as inf).
    #[arg(long, default_value = "0", value_parser = parse_epsilon)]
    pub kl_epsilon: Epsilon,

    /// Dataset format [default: from the file extension].
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,

    #[command(flatten)]
    pub grid: GridArgs,

    /// Write the histogram snapshot here.
    #[arg(long)]
    pub histogram_out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// Comma-separated pruning ratios.
    #[arg(long, value_delimiter = ',', value_parser = parse_ratio, default_value = "0.1,0.2,0.3,0.4,0.5")]
    pub ratios: Vec<f64>,

    /// Number of seeds per ratio and method.
    #[arg(long, default_value_t = 5, value_parser = parse_positive)]
    pub seeds: usize,

    /// First seed; runs use seed-base .. seed-base + seeds.
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,

    #[command(flatten)]
    pub grid: GridArgs,

    #[arg(long, value_parser = parse_positive)]
    pub batch_size: Option<usize>,

    #[arg(long, value_parser = parse_positive)]
    pub initial_size: Option<usize>,

    #[arg(long, default_value_t = 1, value_parser = parse_positive)]
    pub threads: usize,

    /// Write the table as CSV here.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_positive)]
    pub count: usize,

    /// Category weights, e.g. `stationary=0.4,straight=0.5,turns=0.1`.
    #[arg(long, default_value = "stationary=0.4,straight=0.5,turns=0.1")]
    pub mix: String,

    /// Waypoints per trajectory.
    #[arg(long, default_value_t = 16, value_parser = parse_positive)]
    pub points: usize,

    /// Seconds between waypoints.
    #[arg(long, default_value_t = 0.5)]
    pub dt: f64,

    /// Positional noise standard deviation in meters.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,

    #[arg(long, default_value_t = 2.0)]
    pub speed_min: f64,

    #[arg(long, default_value_t = 12.0)]
    pub speed_max: f64,

    #[arg(long, default_value_t = 10.0)]
    pub radius_min: f64,

    #[arg(long, default_value_t = 40.0)]
    pub radius_max: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub output: PathBuf,

    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Threshold,
    TopFraction,
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    /// Histogram snapshot to resume from and save to on clean shutdown.
    #[arg(long)]
    pub state: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub policy: PolicyArg,

    /// Minimum entropy gain in nats (threshold policy); accepts `-inf`.
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: Option<f64>,

    /// Fraction of recent records to keep (top-fraction policy).
    #[arg(long, value_parser = parse_ratio)]
    pub keep_fraction: Option<f64>,

    /// Number of recent gains ranked against (top-fraction policy).
    #[arg(long, value_parser = parse_positive)]
    pub window: Option<usize>,

    /// Grid cell size [default: from --state, else 0.5].
    #[arg(long)]
    pub cell_size: Option<f64>,

    /// Heading bins [default: from --state, else 0].
    #[arg(long)]
    pub heading_bins: Option<u32>,

    /// Print one decision per record to stderr.
    #[arg(long)]
    pub verbose: bool,
}
