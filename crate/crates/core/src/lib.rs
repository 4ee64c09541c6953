//! Measure how unevenly a classifier's accuracy is distributed across
//! classes, and repair the imbalance after the fact.
//!
//! The pipeline in one breath: load per-instance class probabilities with
//! gold labels ([`dataset`], [`io`]), measure per-class accuracy inequality
//! with the Gini index and COBias ([`metrics`]), search for a per-class
//! probability correction that flattens the inequality ([`correction`],
//! [`optimizer`]), and evaluate the corrected predictions on held-out data.
//!
//! Everything seeded is deterministic: the same inputs and seeds reproduce
//! the same splits, synthetic sets, and search results exactly.

pub mod correction;
pub mod dataset;
pub mod io;
pub mod metrics;
pub mod optimizer;

pub use correction::{
    corrected_class_accuracy, corrected_predict, corrected_scores, CorrectionError,
    CorrectionFunction, CorrectionMap, SelectionVector,
};
pub use dataset::{
    argmax, per_class_accuracy, split, synthesize, DatasetError, LabeledPredictionSet, SplitSpec,
    SynthSpec,
};
pub use io::{load_accuracy_vector, load_predictions, write_predictions, PredictionFormat};
pub use metrics::{
    gini_from_cobias, max_gini_bound, metrics_report, ClassAccuracyVector, MetricsError,
    MetricsReport,
};
pub use optimizer::{
    anneal, evaluate_on_test, exhaustive_search, exhaustive_search_with_budget, neighbor,
    objective_value, AnnealConfig, Objective, OptimizationResult, OptimizerError,
    DEFAULT_EXHAUSTIVE_BUDGET,
};
