//! Inequality metrics over per-class accuracy vectors.
//!
//! The central quantity is the Gini index of class accuracies: the mean
//! absolute pairwise accuracy difference, halved and normalized by the mean
//! accuracy. A value of 0 means every class is predicted equally well; the
//! maximum attainable value for N classes is (N-1)/N, reached when a single
//! class absorbs all correct predictions. COBias is the companion
//! unnormalized measure: the mean absolute accuracy gap over unordered class
//! pairs. The two are linked by
//!
//! ```text
//! gini = (N - 1) / (2 * N * mean) * cobias
//! ```
//!
//! and both implementations share the same pairwise summation so the
//! identity holds to floating-point precision.
//!
//! Gini and top-class dominance divide by the mean accuracy, so they are
//! undefined (`None`) when every class has accuracy zero. Callers decide how
//! to render that; nothing here substitutes a sentinel value.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("accuracy vector must not be empty")]
    Empty,
    #[error("need at least {min} classes, got {got}")]
    TooFewClasses { min: usize, got: usize },
    #[error("accuracy for class {class} must lie in [0, 1], got {value}")]
    AccuracyOutOfRange { class: usize, value: f64 },
    #[error("{accuracies} accuracies paired with {supports} supports")]
    LengthMismatch { accuracies: usize, supports: usize },
    #[error("class {class} has zero support, so its accuracy is not estimable")]
    ZeroSupport { class: usize },
    #[error("mean accuracy must be positive, got {0}")]
    NonPositiveMean(f64),
}

/// Per-class accuracies paired with the number of instances each accuracy
/// was measured on. Accuracies are validated to lie in [0, 1]; supports may
/// be zero at this level (a support of zero marks "no instances seen", which
/// [`metrics_report`] refuses but cheaper accessors tolerate).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassAccuracyVector {
    accuracies: Vec<f64>,
    supports: Vec<usize>,
}

impl ClassAccuracyVector {
    pub fn new(accuracies: Vec<f64>, supports: Vec<usize>) -> Result<Self, MetricsError> {
        if accuracies.is_empty() {
            return Err(MetricsError::Empty);
        }
        if accuracies.len() != supports.len() {
            return Err(MetricsError::LengthMismatch {
                accuracies: accuracies.len(),
                supports: supports.len(),
            });
        }
        for (class, &value) in accuracies.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(MetricsError::AccuracyOutOfRange { class, value });
            }
        }
        Ok(Self {
            accuracies,
            supports,
        })
    }

    /// Accuracy vector with a nominal support of one instance per class.
    /// Useful for worked examples where only the rates are known.
    pub fn from_accuracies(accuracies: Vec<f64>) -> Result<Self, MetricsError> {
        let supports = vec![1; accuracies.len()];
        Self::new(accuracies, supports)
    }

    pub fn n_classes(&self) -> usize {
        self.accuracies.len()
    }

    pub fn accuracies(&self) -> &[f64] {
        &self.accuracies
    }

    pub fn supports(&self) -> &[usize] {
        &self.supports
    }

    /// True when every class has at least one measured instance.
    pub fn fully_supported(&self) -> bool {
        self.supports.iter().all(|&s| s > 0)
    }

    /// Unweighted mean of the per-class accuracies. Supports deliberately do
    /// not weight this: the metrics treat classes as equals regardless of
    /// how many instances each contributes.
    pub fn mean_accuracy(&self) -> f64 {
        self.accuracies.iter().sum::<f64>() / self.accuracies.len() as f64
    }

    /// Gini index of the accuracy vector:
    ///
    /// ```text
    /// gini = sum_ij |a_i - a_j| / (2 * N^2 * mean)
    /// ```
    ///
    /// `None` when the mean accuracy is zero (the ratio is 0/0). For a
    /// single class the index is 0.
    pub fn gini(&self) -> Option<f64> {
        let mean = self.mean_accuracy();
        if mean == 0.0 {
            return None;
        }
        let n = self.accuracies.len() as f64;
        let double_sum = 2.0 * pairwise_gap_sum(&self.accuracies);
        Some(double_sum / (2.0 * n * n * mean))
    }

    /// Mean absolute accuracy difference over unordered class pairs:
    ///
    /// ```text
    /// cobias = 2 / (N * (N - 1)) * sum_{i<j} |a_i - a_j|
    /// ```
    ///
    /// Needs at least two classes; there is no pair to compare otherwise.
    pub fn cobias(&self) -> Result<f64, MetricsError> {
        let n = self.accuracies.len();
        if n < 2 {
            return Err(MetricsError::TooFewClasses { min: 2, got: n });
        }
        let pairs = (n * (n - 1) / 2) as f64;
        Ok(pairwise_gap_sum(&self.accuracies) / pairs)
    }

    /// Ratio of the best class accuracy to the mean accuracy. Dominance 1.0
    /// means perfectly balanced; large values mean one class towers over the
    /// rest. `None` when the mean is zero.
    pub fn top_class_dominance(&self) -> Option<f64> {
        let mean = self.mean_accuracy();
        if mean == 0.0 {
            return None;
        }
        let max = self.accuracies.iter().cloned().fold(f64::MIN, f64::max);
        Some(max / mean)
    }
}

/// Sum of |a_i - a_j| over unordered pairs i < j. Both `gini` and `cobias`
/// are defined through this sum; sharing it keeps their algebraic relation
/// exact to rounding error.
fn pairwise_gap_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            sum += (values[i] - values[j]).abs();
        }
    }
    sum
}

/// Largest Gini index an N-class accuracy vector can attain: (N - 1) / N,
/// reached exactly when one class holds all the accuracy mass.
pub fn max_gini_bound(n_classes: usize) -> Result<f64, MetricsError> {
    if n_classes < 1 {
        return Err(MetricsError::Empty);
    }
    Ok((n_classes as f64 - 1.0) / n_classes as f64)
}

/// Recover the Gini index from COBias, the mean accuracy, and the class
/// count via `gini = (N - 1) / (2 * N * mean) * cobias`.
pub fn gini_from_cobias(
    cobias: f64,
    mean_accuracy: f64,
    n_classes: usize,
) -> Result<f64, MetricsError> {
    if n_classes < 2 {
        return Err(MetricsError::TooFewClasses {
            min: 2,
            got: n_classes,
        });
    }
    // Rejects NaN along with zero and negatives.
    if mean_accuracy.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(MetricsError::NonPositiveMean(mean_accuracy));
    }
    let n = n_classes as f64;
    Ok((n - 1.0) / (2.0 * n * mean_accuracy) * cobias)
}

/// Everything the metrics layer can say about one accuracy vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub mean_accuracy: f64,
    /// `None` when all accuracies are zero.
    pub gini: Option<f64>,
    pub cobias: f64,
    /// `None` when all accuracies are zero.
    pub top_class_dominance: Option<f64>,
    pub max_gini_bound: f64,
    pub per_class: ClassAccuracyVector,
}

/// Full metrics report for a vector with at least two classes, all of them
/// measured on at least one instance. Zero-support classes are refused
/// rather than silently treated as accuracy 0; callers must filter or fix
/// the data first.
pub fn metrics_report(accuracy: &ClassAccuracyVector) -> Result<MetricsReport, MetricsError> {
    if accuracy.n_classes() < 2 {
        return Err(MetricsError::TooFewClasses {
            min: 2,
            got: accuracy.n_classes(),
        });
    }
    if let Some(class) = accuracy.supports().iter().position(|&s| s == 0) {
        return Err(MetricsError::ZeroSupport { class });
    }
    Ok(MetricsReport {
        mean_accuracy: accuracy.mean_accuracy(),
        gini: accuracy.gini(),
        cobias: accuracy.cobias()?,
        top_class_dominance: accuracy.top_class_dominance(),
        max_gini_bound: max_gini_bound(accuracy.n_classes())?,
        per_class: accuracy.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn acc(values: &[f64]) -> ClassAccuracyVector {
        ClassAccuracyVector::from_accuracies(values.to_vec()).unwrap()
    }

    /// Independent Gini oracle over the sorted vector:
    /// sum_i (2i - N - 1) x_(i) / (N^2 * mean) with x ascending, i = 1..N.
    fn gini_sorted_oracle(values: &[f64]) -> Option<f64> {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        if mean == 0.0 {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let weighted: f64 = sorted
            .iter()
            .enumerate()
            .map(|(idx, v)| (2.0 * (idx as f64 + 1.0) - n - 1.0) * v)
            .sum();
        Some(weighted / (n * n * mean))
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            ClassAccuracyVector::new(vec![], vec![]),
            Err(MetricsError::Empty)
        );
        assert_eq!(
            ClassAccuracyVector::new(vec![0.5], vec![1, 2]),
            Err(MetricsError::LengthMismatch {
                accuracies: 1,
                supports: 2
            })
        );
        assert!(matches!(
            ClassAccuracyVector::from_accuracies(vec![0.5, 1.2]),
            Err(MetricsError::AccuracyOutOfRange { class: 1, .. })
        ));
        assert!(matches!(
            ClassAccuracyVector::from_accuracies(vec![-0.1]),
            Err(MetricsError::AccuracyOutOfRange { class: 0, .. })
        ));
        assert!(matches!(
            ClassAccuracyVector::from_accuracies(vec![f64::NAN]),
            Err(MetricsError::AccuracyOutOfRange { class: 0, .. })
        ));
    }

    #[test]
    fn mean_accuracy_examples() {
        assert!((acc(&[1.0, 0.0, 0.0, 0.0]).mean_accuracy() - 0.25).abs() < 1e-15);
        assert!((acc(&[0.85, 0.98, 0.97, 0.19]).mean_accuracy() - 0.7475).abs() < 1e-15);
        assert_eq!(acc(&[0.0, 0.0]).mean_accuracy(), 0.0);
    }

    #[test]
    fn gini_worked_examples() {
        // One-hot: the single productive class drives the index to its
        // (N-1)/N ceiling.
        assert!((acc(&[1.0, 0.0, 0.0, 0.0]).gini().unwrap() - 0.75).abs() < 1e-12);
        assert!((acc(&[0.8, 0.2, 0.0, 0.0]).gini().unwrap() - 0.65).abs() < 1e-12);
        assert!((acc(&[1.0, 1.0, 0.0, 0.0]).gini().unwrap() - 0.50).abs() < 1e-12);
        // Constant vectors have no inequality at all.
        assert_eq!(acc(&[0.7, 0.7, 0.7]).gini().unwrap(), 0.0);
        // Undefined when nothing is ever right.
        assert_eq!(acc(&[0.0, 0.0, 0.0]).gini(), None);
        // Single class: defined, and trivially zero.
        assert_eq!(acc(&[0.4]).gini().unwrap(), 0.0);
    }

    #[test]
    fn gini_four_class_benchmark_vector() {
        let g = acc(&[0.85, 0.98, 0.97, 0.19]).gini().unwrap();
        assert!((g - 4.98 / 23.92).abs() < 1e-12);
        assert!((g - 0.21).abs() <= 0.005);
    }

    #[test]
    fn gini_five_class_skewed_vector() {
        let v = acc(&[0.0, 0.87, 0.03, 0.04, 0.20]);
        let g = v.gini().unwrap();
        assert!((g - 0.67).abs() <= 0.005);
        let d = v.top_class_dominance().unwrap();
        assert!((d - 3.82).abs() <= 0.005);
    }

    #[test]
    fn cobias_worked_examples() {
        assert!((acc(&[1.0, 0.0, 0.0, 0.0]).cobias().unwrap() - 0.5).abs() < 1e-12);
        let c = acc(&[0.8, 0.2, 0.0, 0.0]).cobias().unwrap();
        assert!((c - 13.0 / 30.0).abs() < 1e-12);
        assert!((c - 0.43).abs() <= 0.005);
        assert!((acc(&[1.0, 1.0, 0.0, 0.0]).cobias().unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(acc(&[0.5, 0.5]).cobias().unwrap(), 0.0);
        // Defined even when gini is not: an all-zero vector has zero gaps.
        assert_eq!(acc(&[0.0, 0.0, 0.0]).cobias().unwrap(), 0.0);
        assert_eq!(
            acc(&[0.5]).cobias(),
            Err(MetricsError::TooFewClasses { min: 2, got: 1 })
        );
    }

    #[test]
    fn cobias_five_class_skewed_vector() {
        let c = acc(&[0.0, 0.87, 0.03, 0.04, 0.20]).cobias().unwrap();
        assert!((c - 0.382).abs() < 1e-12);
        assert!((c - 0.38).abs() <= 0.005);
    }

    #[test]
    fn top_class_dominance_examples() {
        let d = acc(&[0.85, 0.98, 0.97, 0.19]).top_class_dominance().unwrap();
        assert!((d - 0.98 / 0.7475).abs() < 1e-12);
        assert!((d - 1.31).abs() <= 0.005);
        assert_eq!(acc(&[0.6, 0.6, 0.6]).top_class_dominance().unwrap(), 1.0);
        assert_eq!(acc(&[0.0, 0.0]).top_class_dominance(), None);
    }

    #[test]
    fn max_gini_bound_examples() {
        assert_eq!(max_gini_bound(1).unwrap(), 0.0);
        assert_eq!(max_gini_bound(4).unwrap(), 0.75);
        assert!((max_gini_bound(100).unwrap() - 0.99).abs() < 1e-15);
        assert_eq!(max_gini_bound(0), Err(MetricsError::Empty));
    }

    #[test]
    fn gini_from_cobias_examples() {
        assert!((gini_from_cobias(0.5, 0.25, 4).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(gini_from_cobias(0.0, 0.4, 3).unwrap(), 0.0);
        let g = gini_from_cobias(0.667, 0.5, 4).unwrap();
        assert!((g - 0.50025).abs() < 1e-12);
        assert_eq!(
            gini_from_cobias(0.5, 0.0, 4),
            Err(MetricsError::NonPositiveMean(0.0))
        );
        assert_eq!(
            gini_from_cobias(0.5, -0.1, 4),
            Err(MetricsError::NonPositiveMean(-0.1))
        );
        assert_eq!(
            gini_from_cobias(0.5, 0.5, 1),
            Err(MetricsError::TooFewClasses { min: 2, got: 1 })
        );
    }

    #[test]
    fn report_carries_all_fields() {
        let v = ClassAccuracyVector::new(vec![0.85, 0.98, 0.97, 0.19], vec![100, 100, 100, 100])
            .unwrap();
        let report = metrics_report(&v).unwrap();
        assert!((report.mean_accuracy - 0.7475).abs() < 1e-15);
        assert!((report.gini.unwrap() - 0.208).abs() < 5e-4);
        assert!((report.cobias - 0.415).abs() < 5e-4);
        assert!((report.top_class_dominance.unwrap() - 1.311).abs() < 5e-4);
        assert_eq!(report.max_gini_bound, 0.75);
        assert_eq!(report.per_class, v);
        assert!(report.gini.unwrap() <= report.max_gini_bound + 1e-12);
    }

    #[test]
    fn report_balanced_and_degenerate_vectors() {
        let balanced = metrics_report(&acc(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(balanced.mean_accuracy, 1.0);
        assert_eq!(balanced.gini, Some(0.0));
        assert_eq!(balanced.cobias, 0.0);
        assert_eq!(balanced.top_class_dominance, Some(1.0));

        let hopeless = metrics_report(&acc(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(hopeless.mean_accuracy, 0.0);
        assert_eq!(hopeless.gini, None);
        assert_eq!(hopeless.cobias, 0.0);
        assert_eq!(hopeless.top_class_dominance, None);
    }

    #[test]
    fn report_refuses_thin_input() {
        assert_eq!(
            metrics_report(&acc(&[0.9])),
            Err(MetricsError::TooFewClasses { min: 2, got: 1 })
        );
        let partial = ClassAccuracyVector::new(vec![0.9, 0.0], vec![10, 0]).unwrap();
        assert_eq!(
            metrics_report(&partial),
            Err(MetricsError::ZeroSupport { class: 1 })
        );
    }

    #[test]
    fn gini_matches_sorted_oracle_on_fixed_vectors() {
        for values in [
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.8, 0.2, 0.0, 0.0],
            vec![0.85, 0.98, 0.97, 0.19],
            vec![0.0, 0.87, 0.03, 0.04, 0.20],
            vec![0.33, 0.33, 0.34],
        ] {
            let ours = acc(&values).gini();
            let oracle = gini_sorted_oracle(&values);
            match (ours, oracle) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12, "{a} vs {b}"),
                (a, b) => panic!("definedness mismatch: {a:?} vs {b:?}"),
            }
        }
    }

    fn accuracy_vectors() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..=1.0, 2..=100)
    }

    proptest! {
        #[test]
        fn prop_gini_matches_sorted_oracle(values in accuracy_vectors()) {
            let v = acc(&values);
            match (v.gini(), gini_sorted_oracle(&values)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (None, None) => {}
                (a, b) => prop_assert!(false, "definedness mismatch: {a:?} vs {b:?}"),
            }
        }

        #[test]
        fn prop_gini_cobias_identity(values in accuracy_vectors()) {
            let v = acc(&values);
            prop_assume!(v.mean_accuracy() > 0.0);
            let direct = v.gini().unwrap();
            let via_cobias =
                gini_from_cobias(v.cobias().unwrap(), v.mean_accuracy(), v.n_classes()).unwrap();
            prop_assert!((direct - via_cobias).abs() < 1e-12);
        }

        #[test]
        fn prop_gini_respects_bound(values in accuracy_vectors()) {
            let v = acc(&values);
            if let Some(g) = v.gini() {
                let bound = max_gini_bound(v.n_classes()).unwrap();
                prop_assert!(g >= 0.0);
                prop_assert!(g <= bound + 1e-12);
            }
        }

        #[test]
        fn prop_one_hot_attains_bound(
            n in 2usize..=100,
            k in 0usize..100,
            value in 0.01f64..=1.0,
        ) {
            let mut values = vec![0.0; n];
            values[k % n] = value;
            let g = acc(&values).gini().unwrap();
            let bound = max_gini_bound(n).unwrap();
            prop_assert!((g - bound).abs() < 1e-12);
        }

        #[test]
        fn prop_gini_scale_invariant_cobias_scales(
            values in accuracy_vectors(),
            t in 0.01f64..=1.0,
        ) {
            let v = acc(&values);
            prop_assume!(v.mean_accuracy() > 0.0);
            let max = values.iter().cloned().fold(f64::MIN, f64::max);
            // c ranges over (0, 1/max] so the scaled vector stays in [0, 1].
            let c = t / max;
            let scaled = acc(&values.iter().map(|x| c * x).collect::<Vec<_>>());
            prop_assert!((scaled.gini().unwrap() - v.gini().unwrap()).abs() < 1e-12);
            prop_assert!((scaled.cobias().unwrap() - c * v.cobias().unwrap()).abs() < 1e-12);
        }

        #[test]
        fn prop_metrics_permutation_invariant(values in accuracy_vectors(), seed in any::<u64>()) {
            let mut shuffled = values.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let a = acc(&values);
            let b = acc(&shuffled);
            match (a.gini(), b.gini()) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
                (None, None) => {}
                _ => prop_assert!(false, "permutation changed definedness"),
            }
            prop_assert!((a.cobias().unwrap() - b.cobias().unwrap()).abs() < 1e-12);
        }
    }
}
