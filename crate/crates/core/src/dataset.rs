//! Labeled prediction sets and the operations the rest of the crate builds
//! on: argmax prediction, per-class accuracy, deterministic splitting, and
//! synthetic generation with a controllable head-class bias.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::metrics::{ClassAccuracyVector, MetricsError};

/// Row numbers in these errors are 1-based data-record indices. For CSV
/// input add one for the header line to get the file line number; for JSONL
/// the record index is the line number.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("prediction set must contain at least one row")]
    EmptySet,
    #[error("prediction rows must have at least one class column")]
    NoClasses,
    #[error("row {row}: expected {expected} probabilities, found {found}")]
    InconsistentWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: negative probability {value}")]
    NegativeProbability { row: usize, value: f64 },
    #[error("row {row}: non-finite probability {value}")]
    NonFiniteProbability { row: usize, value: f64 },
    #[error("row {row}: probabilities sum to zero, no prediction can be drawn")]
    AllZeroRow { row: usize },
    #[error("row {row}: label {label} out of range for {n_classes} classes")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        n_classes: usize,
    },
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("{0} class names for {1} classes")]
    ClassNameCount(usize, usize),
    #[error("{0} ids for {1} rows")]
    IdCount(usize, usize),
    #[error("class {class} has no instances")]
    MissingClass { class: usize },
    #[error("{got} predictions for {expected} instances")]
    PredictionCount { got: usize, expected: usize },
    #[error("optimization fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("cannot split: {0}")]
    SplitInfeasible(String),
    #[error("bad synthesis spec: {0}")]
    BadSynthSpec(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Per-instance class probabilities with gold labels. Rows are normalized
/// to sum to one at construction; labels are validated against the class
/// count. Instances may carry an opaque id that survives into reports.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPredictionSet {
    probs: Vec<Vec<f64>>,
    labels: Vec<usize>,
    n_classes: usize,
    class_names: Option<Vec<String>>,
    ids: Vec<Option<String>>,
}

/// Tolerated drift from 1.0 for an incoming row sum before it is treated as
/// unnormalized data worth renormalizing silently. Rows further out are
/// still renormalized; the constant only documents the expectation.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

impl LabeledPredictionSet {
    pub fn new(probs: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self, DatasetError> {
        if probs.is_empty() {
            return Err(DatasetError::EmptySet);
        }
        if probs.len() != labels.len() {
            return Err(DatasetError::PredictionCount {
                got: labels.len(),
                expected: probs.len(),
            });
        }
        let n_classes = probs[0].len();
        if n_classes == 0 {
            return Err(DatasetError::NoClasses);
        }
        let mut normalized = Vec::with_capacity(probs.len());
        for (idx, row) in probs.into_iter().enumerate() {
            let row_no = idx + 1;
            if row.len() != n_classes {
                return Err(DatasetError::InconsistentWidth {
                    row: row_no,
                    expected: n_classes,
                    found: row.len(),
                });
            }
            for &value in &row {
                if !value.is_finite() {
                    return Err(DatasetError::NonFiniteProbability { row: row_no, value });
                }
                if value < 0.0 {
                    return Err(DatasetError::NegativeProbability { row: row_no, value });
                }
            }
            let sum: f64 = row.iter().sum();
            if sum == 0.0 {
                return Err(DatasetError::AllZeroRow { row: row_no });
            }
            normalized.push(row.into_iter().map(|v| v / sum).collect());
        }
        for (idx, &label) in labels.iter().enumerate() {
            if label >= n_classes {
                return Err(DatasetError::LabelOutOfRange {
                    row: idx + 1,
                    label,
                    n_classes,
                });
            }
        }
        let ids = vec![None; labels.len()];
        Ok(Self {
            probs: normalized,
            labels,
            n_classes,
            class_names: None,
            ids,
        })
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self, DatasetError> {
        if names.len() != self.n_classes {
            return Err(DatasetError::ClassNameCount(names.len(), self.n_classes));
        }
        self.class_names = Some(names);
        Ok(self)
    }

    pub fn with_ids(mut self, ids: Vec<Option<String>>) -> Result<Self, DatasetError> {
        if ids.len() != self.labels.len() {
            return Err(DatasetError::IdCount(ids.len(), self.labels.len()));
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn prob_row(&self, instance: usize) -> &[f64] {
        &self.probs[instance]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn ids(&self) -> &[Option<String>] {
        &self.ids
    }

    pub fn class_names(&self) -> Option<&[String]> {
        self.class_names.as_deref()
    }

    /// Argmax prediction for every instance.
    pub fn predictions(&self) -> Vec<usize> {
        self.probs.iter().map(|row| argmax(row)).collect()
    }

    /// New set holding the given instances, in the given order. Class names
    /// carry over; rows are already normalized so no revalidation happens.
    pub(crate) fn subset(&self, indices: &[usize]) -> Self {
        Self {
            probs: indices.iter().map(|&i| self.probs[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            class_names: self.class_names.clone(),
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
        }
    }
}

/// Index of the largest score; ties break toward the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in scores.iter().enumerate().skip(1) {
        if v > scores[best] {
            best = i;
        }
    }
    best
}

/// Per-class accuracy of `predictions` against the gold labels. Supports
/// count gold instances per class. With `strict` set, a class that never
/// appears in the labels is an error; otherwise its accuracy is reported as
/// 0 with support 0, and downstream consumers decide whether that is usable.
pub fn per_class_accuracy(
    set: &LabeledPredictionSet,
    predictions: &[usize],
    strict: bool,
) -> Result<ClassAccuracyVector, DatasetError> {
    if predictions.len() != set.n_instances() {
        return Err(DatasetError::PredictionCount {
            got: predictions.len(),
            expected: set.n_instances(),
        });
    }
    let n = set.n_classes();
    let mut correct = vec![0usize; n];
    let mut support = vec![0usize; n];
    for (&label, &pred) in set.labels().iter().zip(predictions) {
        support[label] += 1;
        if pred == label {
            correct[label] += 1;
        }
    }
    if strict {
        if let Some(class) = support.iter().position(|&s| s == 0) {
            return Err(DatasetError::MissingClass { class });
        }
    }
    let accuracies = correct
        .iter()
        .zip(&support)
        .map(|(&c, &s)| if s > 0 { c as f64 / s as f64 } else { 0.0 })
        .collect();
    Ok(ClassAccuracyVector::new(accuracies, support)?)
}

/// How to split a set into an optimization part and a test part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    /// Fraction of instances routed to the optimization part, in (0, 1).
    pub optimization_fraction: f64,
    pub seed: u64,
    /// Split within each class separately so both parts keep the label
    /// distribution (and in particular cover every class).
    pub stratified: bool,
}

/// Deterministic split into (optimization, test). Both parts are non-empty.
/// A stratified split keeps each class's share of the optimization part
/// within one instance of the requested fraction and requires at least two
/// instances per class so both parts cover every class.
pub fn split(
    set: &LabeledPredictionSet,
    spec: &SplitSpec,
) -> Result<(LabeledPredictionSet, LabeledPredictionSet), DatasetError> {
    let f = spec.optimization_fraction;
    if !f.is_finite() || f <= 0.0 || f >= 1.0 {
        return Err(DatasetError::BadFraction(f));
    }
    let m = set.n_instances();
    if m < 2 {
        return Err(DatasetError::SplitInfeasible(format!(
            "{m} instance(s) cannot fill two non-empty parts"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut optimization = Vec::new();
    let mut test = Vec::new();
    if spec.stratified {
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); set.n_classes()];
        for (idx, &label) in set.labels().iter().enumerate() {
            by_class[label].push(idx);
        }
        for (class, mut members) in by_class.into_iter().enumerate() {
            if members.len() < 2 {
                return Err(DatasetError::SplitInfeasible(format!(
                    "class {class} has {} instance(s); stratified splitting needs 2",
                    members.len()
                )));
            }
            members.shuffle(&mut rng);
            let want = (f * members.len() as f64).ceil() as usize;
            let take = want.clamp(1, members.len() - 1);
            optimization.extend_from_slice(&members[..take]);
            test.extend_from_slice(&members[take..]);
        }
    } else {
        let mut indices: Vec<usize> = (0..m).collect();
        indices.shuffle(&mut rng);
        let want = (f * m as f64).floor() as usize;
        let take = want.clamp(1, m - 1);
        optimization.extend_from_slice(&indices[..take]);
        test.extend_from_slice(&indices[take..]);
    }
    optimization.sort_unstable();
    test.sort_unstable();
    Ok((set.subset(&optimization), set.subset(&test)))
}

/// Recipe for a synthetic prediction set. Instances are generated per class
/// from logits `1{i == label} + head_bias * 1{i in head_classes} +
/// noise_scale * N(0, 1)`, pushed through a softmax. A large `head_bias`
/// makes the head classes swallow predictions from everywhere, which is
/// exactly the accuracy imbalance the metrics and the optimizer are about.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_classes: usize,
    pub instances_per_class: Vec<usize>,
    pub head_bias: f64,
    pub head_classes: BTreeSet<usize>,
    pub noise_scale: f64,
    pub seed: u64,
}

impl SynthSpec {
    fn validate(&self) -> Result<(), DatasetError> {
        if self.n_classes < 2 {
            return Err(DatasetError::BadSynthSpec(format!(
                "need at least 2 classes, got {}",
                self.n_classes
            )));
        }
        if self.instances_per_class.len() != self.n_classes {
            return Err(DatasetError::BadSynthSpec(format!(
                "{} per-class counts for {} classes",
                self.instances_per_class.len(),
                self.n_classes
            )));
        }
        if let Some(class) = self.instances_per_class.iter().position(|&c| c == 0) {
            return Err(DatasetError::BadSynthSpec(format!(
                "class {class} has zero instances"
            )));
        }
        if let Some(&class) = self.head_classes.iter().find(|&&c| c >= self.n_classes) {
            return Err(DatasetError::BadSynthSpec(format!(
                "head class {class} out of range for {} classes",
                self.n_classes
            )));
        }
        if !self.head_bias.is_finite() || self.head_bias < 0.0 {
            return Err(DatasetError::BadSynthSpec(format!(
                "head bias must be finite and non-negative, got {}",
                self.head_bias
            )));
        }
        if !self.noise_scale.is_finite() || self.noise_scale < 0.0 {
            return Err(DatasetError::BadSynthSpec(format!(
                "noise scale must be finite and non-negative, got {}",
                self.noise_scale
            )));
        }
        Ok(())
    }
}

/// Logit weight of the true class before bias and noise.
const TRUE_CLASS_SIGNAL: f64 = 1.0;

/// Generate a synthetic prediction set. Deterministic in the spec: the same
/// spec always yields the same set, byte for byte. Rows are grouped by class
/// in label order.
pub fn synthesize(spec: &SynthSpec) -> Result<LabeledPredictionSet, DatasetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total: usize = spec.instances_per_class.iter().sum();
    let mut probs = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for (label, &count) in spec.instances_per_class.iter().enumerate() {
        for _ in 0..count {
            let logits: Vec<f64> = (0..spec.n_classes)
                .map(|i| {
                    let mut z = if i == label { TRUE_CLASS_SIGNAL } else { 0.0 };
                    if spec.head_classes.contains(&i) {
                        z += spec.head_bias;
                    }
                    let noise: f64 = rng.sample(StandardNormal);
                    z + spec.noise_scale * noise
                })
                .collect();
            probs.push(softmax(&logits));
            labels.push(label);
        }
    }
    LabeledPredictionSet::new(probs, labels)
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::MIN, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::metrics_report;
    use proptest::prelude::*;

    fn small_set() -> LabeledPredictionSet {
        LabeledPredictionSet::new(
            vec![
                vec![0.7, 0.2, 0.1],
                vec![0.1, 0.8, 0.1],
                vec![0.3, 0.3, 0.4],
                vec![0.5, 0.4, 0.1],
                vec![0.2, 0.3, 0.5],
                vec![0.1, 0.1, 0.8],
            ],
            vec![0, 1, 1, 0, 2, 2],
        )
        .unwrap()
    }

    #[test]
    fn construction_normalizes_rows() {
        let set = LabeledPredictionSet::new(vec![vec![2.0, 1.0, 1.0]], vec![0]).unwrap();
        assert_eq!(set.prob_row(0), &[0.5, 0.25, 0.25]);
        let sum: f64 = set.prob_row(0).iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn construction_errors_carry_row_numbers() {
        let err = LabeledPredictionSet::new(
            vec![vec![0.5, 0.5], vec![0.5, 0.5, 0.0]],
            vec![0, 0],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            DatasetError::InconsistentWidth {
                row: 2,
                expected: 2,
                found: 3
            }
        ));

        let err =
            LabeledPredictionSet::new(vec![vec![0.5, 0.5], vec![-0.1, 1.1]], vec![0, 0])
                .unwrap_err();
        assert!(matches!(err, DatasetError::NegativeProbability { row: 2, .. }));

        let err = LabeledPredictionSet::new(vec![vec![0.0, 0.0]], vec![0]).unwrap_err();
        assert!(matches!(err, DatasetError::AllZeroRow { row: 1 }));

        let err = LabeledPredictionSet::new(vec![vec![0.5, 0.5]], vec![2]).unwrap_err();
        assert!(matches!(
            err,
            DatasetError::LabelOutOfRange {
                row: 1,
                label: 2,
                n_classes: 2
            }
        ));

        let err = LabeledPredictionSet::new(vec![vec![f64::NAN, 1.0]], vec![0]).unwrap_err();
        assert!(matches!(err, DatasetError::NonFiniteProbability { row: 1, .. }));

        assert!(matches!(
            LabeledPredictionSet::new(vec![], vec![]),
            Err(DatasetError::EmptySet)
        ));
    }

    #[test]
    fn argmax_ties_break_low() {
        assert_eq!(argmax(&[0.2, 0.5, 0.3]), 1);
        assert_eq!(argmax(&[0.4, 0.4, 0.2]), 0);
        assert_eq!(argmax(&[0.25, 0.25, 0.25, 0.25]), 0);
        assert_eq!(argmax(&[1.0]), 0);
    }

    #[test]
    fn per_class_accuracy_counts_correctly() {
        let set = small_set();
        let preds = set.predictions();
        assert_eq!(preds, vec![0, 1, 2, 0, 2, 2]);
        let acc = per_class_accuracy(&set, &preds, true).unwrap();
        assert_eq!(acc.supports(), &[2, 2, 2]);
        assert_eq!(acc.accuracies(), &[1.0, 0.5, 1.0]);
    }

    #[test]
    fn per_class_accuracy_strictness() {
        // No instance of class 2 in the labels.
        let set = LabeledPredictionSet::new(
            vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.7, 0.1]],
            vec![0, 1],
        )
        .unwrap();
        let preds = set.predictions();
        assert!(matches!(
            per_class_accuracy(&set, &preds, true),
            Err(DatasetError::MissingClass { class: 2 })
        ));
        let lenient = per_class_accuracy(&set, &preds, false).unwrap();
        assert_eq!(lenient.supports(), &[1, 1, 0]);
        assert_eq!(lenient.accuracies(), &[1.0, 1.0, 0.0]);
        assert!(!lenient.fully_supported());
    }

    #[test]
    fn per_class_accuracy_rejects_length_mismatch() {
        let set = small_set();
        assert!(matches!(
            per_class_accuracy(&set, &[0, 1], true),
            Err(DatasetError::PredictionCount {
                got: 2,
                expected: 6
            })
        ));
    }

    #[test]
    fn split_parts_partition_the_set() {
        let set = small_set();
        let spec = SplitSpec {
            optimization_fraction: 0.5,
            seed: 3,
            stratified: false,
        };
        let (opt, test) = split(&set, &spec).unwrap();
        assert_eq!(opt.n_instances(), 3);
        assert_eq!(test.n_instances(), 3);
        assert_eq!(opt.n_instances() + test.n_instances(), set.n_instances());
    }

    #[test]
    fn split_is_deterministic_and_seed_sensitive() {
        let set = small_set();
        let spec = SplitSpec {
            optimization_fraction: 0.5,
            seed: 11,
            stratified: true,
        };
        let (a_opt, a_test) = split(&set, &spec).unwrap();
        let (b_opt, b_test) = split(&set, &spec).unwrap();
        assert_eq!(a_opt, b_opt);
        assert_eq!(a_test, b_test);

        let other = SplitSpec { seed: 12, ..spec };
        let mut saw_difference = false;
        for seed in 12..40 {
            let (c_opt, _) = split(&set, &SplitSpec { seed, ..other }).unwrap();
            if c_opt != a_opt {
                saw_difference = true;
                break;
            }
        }
        assert!(saw_difference, "30 seeds never changed the split");
    }

    #[test]
    fn stratified_split_covers_every_class_in_both_parts() {
        let spec = SynthSpec {
            n_classes: 4,
            instances_per_class: vec![5, 9, 14, 3],
            head_bias: 1.0,
            head_classes: [0].into_iter().collect(),
            noise_scale: 0.8,
            seed: 5,
        };
        let set = synthesize(&spec).unwrap();
        let split_spec = SplitSpec {
            optimization_fraction: 0.4,
            seed: 9,
            stratified: true,
        };
        let (opt, test) = split(&set, &split_spec).unwrap();
        for class in 0..4 {
            let in_opt = opt.labels().iter().filter(|&&l| l == class).count();
            let in_test = test.labels().iter().filter(|&&l| l == class).count();
            assert!(in_opt >= 1, "class {class} missing from optimization part");
            assert!(in_test >= 1, "class {class} missing from test part");
            let total = in_opt + in_test;
            let want = 0.4 * total as f64;
            assert!(
                (in_opt as f64 - want).abs() <= 1.0,
                "class {class}: took {in_opt} of {total} for fraction 0.4"
            );
        }
    }

    #[test]
    fn stratified_split_needs_two_per_class() {
        let set = LabeledPredictionSet::new(
            vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.3, 0.7]],
            vec![0, 1, 1],
        )
        .unwrap();
        let spec = SplitSpec {
            optimization_fraction: 0.5,
            seed: 0,
            stratified: true,
        };
        assert!(matches!(
            split(&set, &spec),
            Err(DatasetError::SplitInfeasible(_))
        ));
    }

    #[test]
    fn split_rejects_degenerate_fractions() {
        let set = small_set();
        for f in [0.0, 1.0, -0.2, 1.5, f64::NAN] {
            let spec = SplitSpec {
                optimization_fraction: f,
                seed: 0,
                stratified: false,
            };
            assert!(matches!(split(&set, &spec), Err(DatasetError::BadFraction(_))));
        }
    }

    #[test]
    fn synthesize_is_deterministic() {
        let spec = SynthSpec {
            n_classes: 3,
            instances_per_class: vec![10, 10, 10],
            head_bias: 2.0,
            head_classes: [1].into_iter().collect(),
            noise_scale: 1.0,
            seed: 42,
        };
        let a = synthesize(&spec).unwrap();
        let b = synthesize(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_instances(), 30);
        assert_eq!(a.labels()[..10], [0; 10]);
    }

    #[test]
    fn synthesize_head_bias_skews_accuracy() {
        let biased = SynthSpec {
            n_classes: 4,
            instances_per_class: vec![50, 50, 50, 50],
            head_bias: 2.5,
            head_classes: [0].into_iter().collect(),
            noise_scale: 1.0,
            seed: 7,
        };
        let set = synthesize(&biased).unwrap();
        let acc = per_class_accuracy(&set, &set.predictions(), true).unwrap();
        let report = metrics_report(&acc).unwrap();
        assert!(
            report.gini.unwrap() >= 0.4,
            "head bias 2.5 should push gini past 0.4, got {:?}",
            report.gini
        );
        assert!(acc.accuracies()[0] > acc.accuracies()[1]);

        let flat = SynthSpec {
            head_bias: 0.0,
            head_classes: BTreeSet::new(),
            noise_scale: 0.2,
            seed: 7,
            ..biased
        };
        let set = synthesize(&flat).unwrap();
        let acc = per_class_accuracy(&set, &set.predictions(), true).unwrap();
        let report = metrics_report(&acc).unwrap();
        assert!(
            report.gini.unwrap() < 0.1,
            "unbiased low-noise synthesis should be nearly equal, got {:?}",
            report.gini
        );
    }

    #[test]
    fn synthesize_validates_spec() {
        let good = SynthSpec {
            n_classes: 3,
            instances_per_class: vec![5, 5, 5],
            head_bias: 1.0,
            head_classes: BTreeSet::new(),
            noise_scale: 1.0,
            seed: 0,
        };
        assert!(synthesize(&good).is_ok());
        for bad in [
            SynthSpec { n_classes: 1, instances_per_class: vec![5], ..good.clone() },
            SynthSpec { instances_per_class: vec![5, 5], ..good.clone() },
            SynthSpec { instances_per_class: vec![5, 0, 5], ..good.clone() },
            SynthSpec { head_classes: [7].into_iter().collect(), ..good.clone() },
            SynthSpec { head_bias: -1.0, ..good.clone() },
            SynthSpec { noise_scale: f64::INFINITY, ..good.clone() },
        ] {
            assert!(matches!(
                synthesize(&bad),
                Err(DatasetError::BadSynthSpec(_))
            ));
        }
    }

    proptest! {
        #[test]
        fn prop_split_partitions_and_respects_fraction(
            per_class in prop::collection::vec(2usize..12, 2..5),
            f in 0.1f64..0.9,
            seed in any::<u64>(),
            stratified in any::<bool>(),
        ) {
            let spec = SynthSpec {
                n_classes: per_class.len(),
                instances_per_class: per_class.clone(),
                head_bias: 1.0,
                head_classes: [0].into_iter().collect(),
                noise_scale: 1.0,
                seed,
            };
            let set = synthesize(&spec).unwrap();
            let split_spec = SplitSpec { optimization_fraction: f, seed, stratified };
            let (opt, test) = split(&set, &split_spec).unwrap();
            prop_assert!(opt.n_instances() >= 1);
            prop_assert!(test.n_instances() >= 1);
            prop_assert_eq!(opt.n_instances() + test.n_instances(), set.n_instances());
            // Label multisets of the parts recompose the original.
            let mut combined: Vec<usize> = opt.labels().iter().chain(test.labels()).copied().collect();
            combined.sort_unstable();
            let mut original = set.labels().to_vec();
            original.sort_unstable();
            prop_assert_eq!(combined, original);
            if stratified {
                for class in 0..set.n_classes() {
                    prop_assert!(opt.labels().contains(&class));
                    prop_assert!(test.labels().contains(&class));
                }
            }
        }

        #[test]
        fn prop_synthesized_rows_are_distributions(
            seed in any::<u64>(),
            bias in 0.0f64..4.0,
            noise in 0.0f64..2.0,
        ) {
            let spec = SynthSpec {
                n_classes: 3,
                instances_per_class: vec![4, 4, 4],
                head_bias: bias,
                head_classes: [2].into_iter().collect(),
                noise_scale: noise,
                seed,
            };
            let set = synthesize(&spec).unwrap();
            for m in 0..set.n_instances() {
                let row = set.prob_row(m);
                let sum: f64 = row.iter().sum();
                prop_assert!((sum - 1.0).abs() < 1e-9);
                prop_assert!(row.iter().all(|&p| p >= 0.0));
            }
        }
    }
}
