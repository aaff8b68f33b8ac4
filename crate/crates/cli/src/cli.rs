use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Streaming unexpectedness for discrete event streams.
#[derive(Debug, Parser)]
#[command(name = "unexpect", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every event of a stream.
    Track(TrackArgs),
    /// Continue a run from a snapshot; the engine configuration comes from the snapshot.
    Replay(ReplayArgs),
    /// Best cause of an observation in a cause graph.
    Explain(ExplainArgs),
    /// Compare a world distribution with a mind code.
    Divergence(DivergenceArgs),
    /// Generate a synthetic stream from a source spec.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorKind {
    Fir,
    Iir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Csv,
    Jsonl,
    /// Only the learnt code lengths, as a `{"symbols", "bits"}` file.
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Engine settings. Explicit flags override `--config`, which overrides defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct EngineFlags {
    /// JSON file with any of the keys below (kebab-case).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorKind>,
    /// FIR window length.
    #[arg(long)]
    pub window: Option<usize>,
    /// IIR memory coefficient in (0, 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rate floor: `auto`, `off`, or a value in (0, 1].
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Drop IIR symbols whose rate falls below half the floor.
    #[arg(long)]
    pub prune: bool,
    /// Short-term memory capacity (default unbounded).
    #[arg(long)]
    pub capacity: Option<usize>,
    /// Change-detector EWMA decay in (0, 1).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Change-detector threshold in bits.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Consecutive exceedances before flagging.
    #[arg(long)]
    pub min_hits: Option<u32>,
    /// Decay of the detector's slow reference level, or `off` to threshold the raw average.
    #[arg(long)]
    pub baseline_decay: Option<String>,
    /// Values inspected by the stability check.
    #[arg(long = "stability-m")]
    pub stability_m: Option<usize>,
    /// Allowed spread for the stability check.
    #[arg(long)]
    pub stability_delta: Option<f64>,
}

impl EngineFlags {
    /// Name of the first engine flag present, if any.
    pub fn first_given(&self) -> Option<&'static str> {
        [
            ("--config", self.config.is_some()),
            ("--estimator", self.estimator.is_some()),
            ("--window", self.window.is_some()),
            ("--alpha", self.alpha.is_some()),
            ("--epsilon", self.epsilon.is_some()),
            ("--prune", self.prune),
            ("--capacity", self.capacity.is_some()),
            ("--beta", self.beta.is_some()),
            ("--theta", self.theta.is_some()),
            ("--min-hits", self.min_hits.is_some()),
            ("--baseline-decay", self.baseline_decay.is_some()),
            ("--stability-m", self.stability_m.is_some()),
            ("--stability-delta", self.stability_delta.is_some()),
        ]
        .into_iter()
        .find(|(_, given)| *given)
        .map(|(name, _)| name)
    }
}

/// Output options shared by `track` and `replay`.
#[derive(Debug, Clone, Args)]
pub struct StreamOutput {
    /// Events file (JSONL `{"t","s"}` or one token per line); standard input if omitted.
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jsonl")]
    pub emit: TraceFormat,
    /// Write here instead of standard output (written atomically).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Save the engine state after the last event.
    #[arg(long, value_name = "FILE")]
    pub snapshot_out: Option<PathBuf>,
    /// Print run totals to standard error.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    #[command(flatten)]
    pub engine: EngineFlags,
    #[command(flatten)]
    pub output: StreamOutput,
    /// Resume from a saved engine instead of starting fresh.
    #[arg(long, value_name = "FILE")]
    pub snapshot_in: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long, value_name = "FILE")]
    pub snapshot: PathBuf,
    /// Accepted only to be rejected: the snapshot fixes the configuration.
    #[command(flatten)]
    pub engine: EngineFlags,
    #[command(flatten)]
    pub output: StreamOutput,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Cause graph `{"nodes": [...], "edges": [...]}`.
    #[arg(long, value_name = "FILE", conflicts_with = "bayes", required_unless_present = "bayes")]
    pub graph: Option<PathBuf>,
    /// Raw-probability model `{"observation", "evidence"?, "causes": [...]}`.
    #[arg(long, value_name = "FILE")]
    pub bayes: Option<PathBuf>,
    /// Node to explain (defaults to the Bayes observation).
    #[arg(long)]
    pub target: Option<String>,
    /// Description cost of the target in bits (graph mode).
    #[arg(long, conflicts_with = "bayes", required_unless_present = "bayes")]
    pub cd: Option<f64>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    /// World distribution `{"symbols", "mass" | "bits"}`.
    #[arg(long, value_name = "FILE")]
    pub world: PathBuf,
    /// Mind code `{"symbols", "bits" | "mass"}`; standard input if omitted.
    #[arg(long, value_name = "FILE")]
    pub mind: Option<PathBuf>,
    /// Rescale the mind code to a Kraft sum of one.
    #[arg(long)]
    pub normalize_mind: bool,
    /// Threshold in bits for the soundness and completeness lists.
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub emit: ReportFormat,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Source spec JSON; standard input if omitted.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write the distribution in force at the end of the stream.
    #[arg(long, value_name = "FILE")]
    pub world_out: Option<PathBuf>,
}
