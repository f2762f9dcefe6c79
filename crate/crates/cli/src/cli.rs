//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use modqubo::ConstraintMode;

#[derive(Debug, Parser)]
#[command(name = "modqubo", version, about = "Modularity partitioning with a parallel-trial annealer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition one graph into K groups.
    Partition(PartitionArgs),
    /// One partition per K in a range; CSV `k,q,feasible,solve_time_sec,seed`.
    Sweep(SweepArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
    /// Same graph and K under several time budgets; CSV
    /// `time_limit_sec,solve_time_sec,q`.
    Timestudy(TimestudyArgs),
    /// List registered datasets.
    Datasets(DatasetsArgs),
    /// Rerun a recorded partition and check it reproduces.
    Replay(ReplayArgs),
    /// Write the assembled QUBO (slack mode) as text.
    ExportQubo(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Inequality,
    Slack,
}

impl From<Mode> for ConstraintMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Inequality => ConstraintMode::Inequality,
            Mode::Slack => ConstraintMode::Slack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    EdgeList,
    BranchTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table1,
    Oracle,
}

/// Penalty weight flag; `None` means automatic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda(pub Option<f64>);

/// `auto` or a non-negative number.
pub fn parse_lambda(s: &str) -> Result<Lambda, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Lambda(None));
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(Lambda(Some(v))),
        _ => Err(format!("expected `auto` or a non-negative number, got {s:?}")),
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number of seconds, got {s:?}")),
    }
}

fn parse_budgets(s: &str) -> Result<Budgets, String> {
    s.split(',')
        .map(|b| parse_positive(b.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map(Budgets)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Budgets(pub Vec<f64>);

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Registered dataset name or path to a graph file.
    #[arg(long)]
    pub graph: String,
    /// Use edge weights (default when the source has them).
    #[arg(long, conflicts_with = "unweighted")]
    pub weighted: bool,
    /// Treat every edge as weight 1.
    #[arg(long)]
    pub unweighted: bool,
    /// Format of a graph given by path.
    #[arg(long, value_enum, default_value = "edge-list")]
    pub input_format: InputFormat,
}

impl GraphArgs {
    pub fn weighted(&self) -> Option<bool> {
        match (self.weighted, self.unweighted) {
            (true, _) => Some(true),
            (_, true) => Some(false),
            _ => None,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 10.0, value_parser = parse_positive)]
    pub time_limit_sec: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "inequality")]
    pub mode: Mode,
    #[arg(long, default_value = "auto", value_parser = parse_lambda)]
    pub lambda1: Lambda,
    #[arg(long, default_value = "auto", value_parser = parse_lambda)]
    pub lambda2: Lambda,
    /// Modularity resolution.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Worker threads for candidate evaluation (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Leave infeasible annealer output unrepaired.
    #[arg(long)]
    pub no_repair: bool,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Write the run record here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub k_min: usize,
    #[arg(long)]
    pub k_max: usize,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Run the K rows concurrently.
    #[arg(long)]
    pub parallel_rows: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "table1")]
    pub suite: Suite,
    /// Seeds per table row; the best feasible result counts.
    #[arg(long, default_value_t = 3)]
    pub seeds: usize,
    /// Oracle instances.
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    /// Per-run budget (default 10 for table1, 2 for oracle).
    #[arg(long, value_parser = parse_positive)]
    pub time_limit_sec: Option<f64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TimestudyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub k: usize,
    /// Comma-separated budgets in seconds.
    #[arg(long, value_parser = parse_budgets)]
    pub budgets: Budgets,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DatasetsArgs {
    /// Recount nodes and edges of each present fixture.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Run record (JSON or CSV).
    pub record: PathBuf,
    #[arg(long, value_enum, default_value = "edge-list")]
    pub input_format: InputFormat,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "auto", value_parser = parse_lambda)]
    pub lambda1: Lambda,
    #[arg(long, default_value = "auto", value_parser = parse_lambda)]
    pub lambda2: Lambda,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long)]
    pub out: PathBuf,
}
