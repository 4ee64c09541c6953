//! Command-line surface. Parsing only; semantics live in `commands`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ginidebias::Objective;

#[derive(Debug, Parser)]
#[command(
    name = "ginidebias",
    version,
    about = "Measure per-class accuracy inequality and learn corrections that flatten it"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the inequality metrics report for a predictions or accuracy file.
    Metrics(MetricsArgs),
    /// Search for a per-class correction selection that minimizes an objective.
    Optimize(OptimizeArgs),
    /// Apply a saved correction artifact to a predictions file.
    Apply(ApplyArgs),
    /// Generate a synthetic prediction set with a controllable head-class bias.
    Synth(SynthArgs),
    /// Compare two metrics reports and render the improvement.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
    /// Bare accuracy-vector JSON instead of per-instance predictions.
    Accuracy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Gini,
    Cobias,
}

impl From<ObjectiveArg> for Objective {
    fn from(value: ObjectiveArg) -> Self {
        match value {
            ObjectiveArg::Gini => Objective::Gini,
            ObjectiveArg::Cobias => Objective::Cobias,
        }
    }
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Predictions file (csv/jsonl) or accuracy-vector json.
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Write the metrics document (json) here in addition to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fail on classes with no instances instead of dropping them.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Predictions file to optimize on (csv or jsonl).
    #[arg(long)]
    pub input: PathBuf,
    /// Held-out predictions file. Without it, --input is split into an
    /// optimization part and a test part.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Run-configuration json; flags override individual fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    /// Fraction of --input routed to the optimization part.
    #[arg(long)]
    pub split: Option<f64>,
    /// Split within each class so both parts cover every class.
    #[arg(long)]
    pub stratified: bool,
    /// Output directory for artifact.json, optimize_report.json and, when
    /// splitting, the held-out part.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    /// Predictions file to correct (csv or jsonl).
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Correction artifact produced by `optimize`.
    #[arg(long)]
    pub artifact: PathBuf,
    /// Output directory for corrected.csv and apply_report.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub classes: usize,
    /// Instances per class: one count for all classes, or a comma list.
    #[arg(long, default_value = "100")]
    pub per_class: String,
    /// Extra logit mass the head classes receive on every instance.
    #[arg(long, default_value_t = 2.0)]
    pub head_bias: f64,
    /// Comma list of head-class indices.
    #[arg(long, default_value = "0")]
    pub head_classes: String,
    /// Standard deviation of the logit noise.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format for the generated predictions (default csv).
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output directory for the generated set and its manifest.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Metrics document for the uncorrected predictions.
    #[arg(long)]
    pub before: PathBuf,
    /// Metrics document for the corrected predictions.
    #[arg(long)]
    pub after: PathBuf,
    /// Write the comparison document (json) here in addition to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
