use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qfs::data::{LabelColumn, DEFAULT_BINS};
use qfs::qubo::{ExportFormat, MuPolicy, DEFAULT_EPSILON};
use qfs::solve::{AnnealingParams, SolverConfig, SolverKind, TabuParams};
use qfs::Threshold;

#[derive(Debug, Parser)]
#[command(
    name = "qfs",
    version,
    about = "Feature selection by mutual-information QUBOs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset with known informative features.
    GenSynth(GenSynthArgs),
    /// Quantile-bin every feature of a CSV dataset.
    Discretize(DiscretizeArgs),
    /// Compute the importance vector and redundancy matrix.
    Mi(MiArgs),
    /// Build the QUBO for one value of α.
    Build(BuildArgs),
    /// Solve a QUBO and summarize the shots.
    Solve(SolveArgs),
    /// Search α for a subset of exactly k features.
    Select(SelectArgs),
    /// Subset size and energy of the optimum along an α grid.
    Sweep(SweepArgs),
    /// Check that every subset size is optimal for some α.
    #[command(name = "verify-prop1")]
    VerifyProp1(VerifyArgs),
    /// Compare feature subsets.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Convert a QUBO between formats or to Ising form.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct GenSynthArgs {
    /// Number of features.
    #[arg(long)]
    pub n: usize,
    /// Number of informative features.
    #[arg(long = "d-inf")]
    pub d_inf: usize,
    /// Number of samples.
    #[arg(long = "N", alias = "n-samples")]
    pub n_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; stdout when omitted. The informative indices go to
    /// `<out>.truth.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Labelled CSV file.
    #[arg(long)]
    pub input: PathBuf,
    /// Label column by header name or 0-based index; the last column by default.
    #[arg(long, default_value = "")]
    pub label: String,
}

impl DatasetArgs {
    pub fn label_column(&self) -> LabelColumn {
        label_column(&self.label)
    }
}

pub fn label_column(text: &str) -> LabelColumn {
    if text.is_empty() {
        LabelColumn::Last
    } else {
        text.parse().expect("label parsing is infallible")
    }
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MiArgs {
    /// Labelled CSV, or discretized JSON when the name ends in `.json`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "")]
    pub label: String,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Where importance and redundancy come from.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Labelled CSV; binned and measured on the fly.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Precomputed `{importance, redundancy}` JSON.
    #[arg(long)]
    pub mi: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BinningArgs {
    #[arg(long, default_value = "")]
    pub label: String,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Diagonals with α·Iᵢ below this are replaced by μ.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// `max-entry` or a fixed positive value.
    #[arg(long, default_value = "max-entry", value_parser = parse_mu)]
    pub mu: MuPolicy,
}

impl ThresholdArgs {
    pub fn threshold(&self) -> Threshold {
        Threshold {
            epsilon: self.epsilon,
            mu: self.mu,
        }
    }
}

pub fn parse_mu(text: &str) -> Result<MuPolicy, String> {
    if text == "max-entry" {
        return Ok(MuPolicy::MaxEntry);
    }
    match text.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(MuPolicy::Fixed(v)),
        _ => Err(format!(
            "expected 'max-entry' or a positive number, got '{text}'"
        )),
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// exhaustive, annealing or tabu-decomposition; exhaustive up to 20
    /// variables and tabu-decomposition beyond when omitted.
    #[arg(long)]
    pub solver: Option<SolverKind>,
    /// Independent shots (restarts for tabu-decomposition).
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Annealing sweeps per shot.
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Variables per decomposition subproblem.
    #[arg(long)]
    pub subproblem_size: Option<usize>,
    #[arg(long)]
    pub tenure: Option<usize>,
    /// Non-improving rounds before a decomposition restart stops.
    #[arg(long)]
    pub stall_rounds: Option<usize>,
}

impl SolverArgs {
    pub fn config(&self, n: usize) -> SolverConfig {
        let kind = self.solver.unwrap_or_else(|| SolverKind::default_for(n));
        let mut cfg = SolverConfig::new(kind).with_seed(self.seed);
        if let Some(shots) = self.shots {
            cfg.shots = shots;
        }
        let annealing = AnnealingParams::default();
        cfg.annealing.sweeps = self.sweeps.unwrap_or(annealing.sweeps);
        let tabu = TabuParams::default();
        cfg.tabu.subproblem_size = self.subproblem_size.unwrap_or(tabu.subproblem_size.min(n));
        cfg.tabu.tenure = self.tenure.unwrap_or(tabu.tenure);
        cfg.tabu.stall_rounds = self.stall_rounds.unwrap_or(tabu.stall_rounds);
        cfg
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// `{importance, redundancy}` JSON.
    #[arg(long)]
    pub mi: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// Skip the ε/μ substitution.
    #[arg(long, conflicts_with = "penalty_k")]
    pub raw: bool,
    /// Add the penalty λ(Σx − k)² for this k instead of substituting.
    #[arg(long, requires = "lambda")]
    pub penalty_k: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// `.json` for JSON, anything else for a coordinate list; stdout JSON when
    /// omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the Ising form here.
    #[arg(long)]
    pub ising: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// QUBO file written by `build` or `export`.
    #[arg(long)]
    pub qubo: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Energy counted as optimal; the best sampled energy when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub reference: Option<f64>,
    /// Include every distinct sample in the report.
    #[arg(long)]
    pub samples: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub binning: BinningArgs,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub binning: BinningArgs,
    /// Evenly spaced grid points over [0, 1].
    #[arg(long, default_value_t = 101, conflicts_with = "alphas")]
    pub points: usize,
    /// Explicit comma-separated α values.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Features per random instance.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Verify this instance instead of random ones.
    #[arg(long)]
    pub mi: Option<PathBuf>,
    /// JSON report destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Overlap and swap distance between a selection and the true subset.
    Recovery(RecoveryArgs),
    /// Edit-distance graph between named subsets.
    Graph(GraphArgs),
}

#[derive(Debug, Args)]
pub struct RecoveryArgs {
    /// Selection JSON, truth JSON, subset JSON, or comma-separated indices.
    #[arg(long)]
    pub selected: String,
    /// Same forms as `--selected`.
    #[arg(long)]
    pub truth: String,
    /// Number of features; needed when both subsets are index lists.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// `{"n": .., "subsets": [{"name": .., "features": [..]}, ..]}`.
    #[arg(long)]
    pub subsets: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub qubo: PathBuf,
    /// json or coordinate-list; taken from the output extension when omitted.
    #[arg(long)]
    pub format: Option<ExportFormat>,
    #[arg(long)]
    pub out: PathBuf,
    /// Write the Ising form as JSON instead.
    #[arg(long, conflicts_with = "format")]
    pub ising: bool,
}
