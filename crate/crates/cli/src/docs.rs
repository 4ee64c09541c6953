//! Machine-readable output documents. Every top-level document carries
//! `schema_version` and, when produced by a command run, a manifest that
//! pins down how to reproduce it: the subcommand, the resolved
//! configuration, sha256 digests of all inputs, the seed, and the tool
//! version.
//!
//! Documents avoid wall-clock state so a repeated run is byte-identical.
//! `timestamp_unix` is only populated from the SOURCE_DATE_EPOCH
//! environment variable, the conventional hook for reproducible builds.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use ginidebias::{CorrectionMap, MetricsReport, Objective};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Input file name -> sha256 of its bytes.
    pub input_digests: BTreeMap<String, String>,
    /// Resolved configuration after flag/file/default precedence.
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

impl Manifest {
    pub fn new(
        command: &str,
        seed: Option<u64>,
        inputs: &[(&str, &Path)],
        config: serde_json::Value,
    ) -> Result<Self, CliError> {
        let mut input_digests = BTreeMap::new();
        for (name, path) in inputs {
            let bytes = fs::read(path)
                .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
            input_digests.insert(name.to_string(), hex::encode(Sha256::digest(&bytes)));
        }
        Ok(Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            input_digests,
            config,
            timestamp_unix: source_date_epoch(),
        })
    }
}

fn source_date_epoch() -> Option<u64> {
    std::env::var("SOURCE_DATE_EPOCH").ok()?.parse().ok()
}

/// Standalone manifest file, for commands whose primary output is not a
/// JSON document (synth writes a predictions file).
#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestDoc {
    pub schema_version: u32,
    pub manifest: Manifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDoc {
    pub schema_version: u32,
    pub n_classes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_names: Option<Vec<String>>,
    pub accuracies: Vec<f64>,
    #[serde(default)]
    pub supports: Vec<usize>,
    /// Original indices of classes dropped for having no instances
    /// (non-strict metrics runs only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped_classes: Option<Vec<usize>>,
    pub mean_accuracy: f64,
    /// `null` when every class accuracy is zero.
    pub gini: Option<f64>,
    /// `null` only for a single-class document, where no pair exists.
    pub cobias: Option<f64>,
    /// `null` when every class accuracy is zero.
    pub top_class_dominance: Option<f64>,
    pub max_gini_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Manifest>,
}

impl MetricsDoc {
    pub fn from_report(
        report: &MetricsReport,
        class_names: Option<Vec<String>>,
        manifest: Option<Manifest>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n_classes: report.per_class.n_classes(),
            class_names,
            accuracies: report.per_class.accuracies().to_vec(),
            supports: report.per_class.supports().to_vec(),
            dropped_classes: None,
            mean_accuracy: report.mean_accuracy,
            gini: report.gini,
            cobias: Some(report.cobias),
            top_class_dominance: report.top_class_dominance,
            max_gini_bound: report.max_gini_bound,
            manifest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactDoc {
    pub schema_version: u32,
    pub n_classes: usize,
    pub objective: Objective,
    pub functions: CorrectionMap,
    /// 1-based correction-function choice per class.
    pub xi: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Manifest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeDoc {
    pub before: Option<f64>,
    pub after: Option<f64>,
    /// Signed relative change (after - before) / before; `null` when the
    /// baseline is zero or either side is undefined.
    pub relative: Option<f64>,
    /// Arrow rendering, e.g. "↓ 86%"; "n/a" when `relative` is `null`.
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementDoc {
    pub mean_accuracy: ChangeDoc,
    pub top_class_dominance: ChangeDoc,
    pub cobias: ChangeDoc,
    pub gini: ChangeDoc,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OptimizeReportDoc {
    pub schema_version: u32,
    pub objective: Objective,
    pub initial_objective: f64,
    pub best_objective: f64,
    pub evaluations: u64,
    /// (evaluation count, best objective so far) at every improvement.
    pub objective_trace: Vec<(u64, f64)>,
    pub xi: Vec<usize>,
    pub original_test_metrics: MetricsDoc,
    pub debiased_test_metrics: MetricsDoc,
    pub improvement: ImprovementDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Manifest>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ApplyReportDoc {
    pub schema_version: u32,
    pub n_instances: usize,
    pub n_classes: usize,
    /// How many argmax predictions the correction changed.
    pub changed: usize,
    /// Metrics on the input's labels; absent when some class has no
    /// instances in the applied file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_metrics: Option<MetricsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_metrics: Option<MetricsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Manifest>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComparisonDoc {
    pub schema_version: u32,
    pub improvement: ImprovementDoc,
    pub before: MetricsDoc,
    pub after: MetricsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Manifest>,
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(doc).expect("output documents always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn check_schema_version(doc_version: u32, path: &Path) -> Result<(), CliError> {
    if doc_version != SCHEMA_VERSION {
        return Err(CliError::data(format!(
            "{}: schema_version {doc_version} unsupported (this build reads {SCHEMA_VERSION})",
            path.display()
        )));
    }
    Ok(())
}
