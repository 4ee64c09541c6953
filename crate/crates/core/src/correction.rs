//! Post-hoc probability correction.
//!
//! A correction map is a small library of monotone-enough transforms of a
//! single probability. A selection vector picks one transform per class
//! (1-based, index 1 always the identity), and prediction happens by argmax
//! over the per-class corrected scores. Corrected scores are deliberately
//! not renormalized: argmax does not care, and keeping the raw values makes
//! the transform auditable.

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::dataset::{argmax, per_class_accuracy, DatasetError, LabeledPredictionSet};
use crate::metrics::ClassAccuracyVector;

#[derive(Debug, Error)]
pub enum CorrectionError {
    #[error("correction map must contain at least one function")]
    EmptyMap,
    #[error("function 1 must be the identity, found {found}")]
    FirstNotIdentity { found: String },
    #[error("scale weight must be finite and positive, got {0}")]
    BadScaleWeight(f64),
    #[error("triangular feet must satisfy 0 <= left < peak < right <= 1, got ({0}, {1}, {2})")]
    BadTriangle(f64, f64, f64),
    #[error("selection vector must not be empty")]
    EmptySelection,
    #[error("selection for class {class} is {index}, valid indices are 1..={len}")]
    SelectionOutOfRange {
        class: usize,
        index: usize,
        len: usize,
    },
    #[error("selection vector has {xi} entries for {classes} classes")]
    ClassCountMismatch { xi: usize, classes: usize },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// One probability transform. `evaluate` maps [0, 1] into [0, ∞); only
/// non-negativity is promised, not staying within [0, 1] (a scale weight
/// above 1 exceeds it, and that is fine for argmax).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorrectionFunction {
    Identity,
    Scale { weight: f64 },
    /// Piecewise-linear bump: 0 at `left` and `right`, 1 at `peak`,
    /// linear in between, 0 outside. Boosts a chosen probability band.
    Triangular { left: f64, peak: f64, right: f64 },
}

impl CorrectionFunction {
    pub fn scale(weight: f64) -> Result<Self, CorrectionError> {
        let f = Self::Scale { weight };
        f.validate()?;
        Ok(f)
    }

    pub fn triangular(left: f64, peak: f64, right: f64) -> Result<Self, CorrectionError> {
        let f = Self::Triangular { left, peak, right };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), CorrectionError> {
        match *self {
            Self::Identity => Ok(()),
            Self::Scale { weight } => {
                if weight.is_finite() && weight > 0.0 {
                    Ok(())
                } else {
                    Err(CorrectionError::BadScaleWeight(weight))
                }
            }
            Self::Triangular { left, peak, right } => {
                let finite = left.is_finite() && peak.is_finite() && right.is_finite();
                if finite && 0.0 <= left && left < peak && peak < right && right <= 1.0 {
                    Ok(())
                } else {
                    Err(CorrectionError::BadTriangle(left, peak, right))
                }
            }
        }
    }

    pub fn evaluate(&self, p: f64) -> f64 {
        match *self {
            Self::Identity => p,
            Self::Scale { weight } => weight * p,
            Self::Triangular { left, peak, right } => {
                let rise = (p - left) / (peak - left);
                let fall = (right - p) / (right - peak);
                rise.min(fall).max(0.0)
            }
        }
    }
}

/// Ordered library of correction functions. Index 1 is always the identity,
/// so selection index 1 means "leave this class alone" and the all-ones
/// selection vector reproduces the uncorrected predictions exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CorrectionMap {
    functions: Vec<CorrectionFunction>,
}

impl CorrectionMap {
    pub fn new(functions: Vec<CorrectionFunction>) -> Result<Self, CorrectionError> {
        if functions.is_empty() {
            return Err(CorrectionError::EmptyMap);
        }
        if functions[0] != CorrectionFunction::Identity {
            return Err(CorrectionError::FirstNotIdentity {
                found: format!("{:?}", functions[0]),
            });
        }
        for f in &functions {
            f.validate()?;
        }
        Ok(Self { functions })
    }

    /// The identity-only map. Selection over it can express nothing but the
    /// original predictions.
    pub fn identity_only() -> Self {
        Self {
            functions: vec![CorrectionFunction::Identity],
        }
    }

    /// Default library: identity, five scales, three triangular bumps over
    /// the low, middle, and high probability bands.
    pub fn standard() -> Self {
        let mut functions = vec![CorrectionFunction::Identity];
        for weight in [0.1, 0.2, 0.5, 1.5, 2.0] {
            functions.push(CorrectionFunction::Scale { weight });
        }
        functions.push(CorrectionFunction::Triangular {
            left: 0.0,
            peak: 0.25,
            right: 0.5,
        });
        functions.push(CorrectionFunction::Triangular {
            left: 0.25,
            peak: 0.5,
            right: 0.75,
        });
        functions.push(CorrectionFunction::Triangular {
            left: 0.5,
            peak: 0.75,
            right: 1.0,
        });
        Self { functions }
    }

    /// Identity plus the five scales. Preferred when scores come from a
    /// model whose probabilities are already sharp, where triangular bumps
    /// tend to overfit the optimization split.
    pub fn scales_only() -> Self {
        let mut functions = vec![CorrectionFunction::Identity];
        for weight in [0.1, 0.2, 0.5, 1.5, 2.0] {
            functions.push(CorrectionFunction::Scale { weight });
        }
        Self { functions }
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[CorrectionFunction] {
        &self.functions
    }

    /// Look up by 1-based selection index.
    pub fn get(&self, index: usize) -> Option<&CorrectionFunction> {
        if index == 0 {
            return None;
        }
        self.functions.get(index - 1)
    }
}

impl<'de> Deserialize<'de> for CorrectionMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let functions = Vec::<CorrectionFunction>::deserialize(deserializer)?;
        Self::new(functions).map_err(serde::de::Error::custom)
    }
}

/// One correction-function choice per class, as 1-based indices into a
/// correction map. Construction validates against the map it will be used
/// with; mixing a selection with some other map is a caller bug.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SelectionVector {
    indices: Vec<usize>,
}

impl SelectionVector {
    pub fn new(indices: Vec<usize>, map: &CorrectionMap) -> Result<Self, CorrectionError> {
        if indices.is_empty() {
            return Err(CorrectionError::EmptySelection);
        }
        for (class, &index) in indices.iter().enumerate() {
            if index == 0 || index > map.len() {
                return Err(CorrectionError::SelectionOutOfRange {
                    class,
                    index,
                    len: map.len(),
                });
            }
        }
        Ok(Self { indices })
    }

    /// The all-ones selection: every class keeps its original score.
    pub fn identity(n_classes: usize) -> Self {
        Self {
            indices: vec![1; n_classes],
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n_classes(&self) -> usize {
        self.indices.len()
    }
}

/// Corrected score vector for one instance: class i gets
/// `map[xi[i]](row[i])`. No renormalization. Panics if the row and the
/// selection disagree on the class count; that is a programming error, not
/// a data error.
pub fn corrected_scores(row: &[f64], xi: &SelectionVector, map: &CorrectionMap) -> Vec<f64> {
    assert_eq!(
        row.len(),
        xi.n_classes(),
        "row width and selection length must agree"
    );
    row.iter()
        .zip(xi.indices())
        .map(|(&p, &index)| {
            map.get(index)
                .expect("selection validated against this map")
                .evaluate(p)
        })
        .collect()
}

/// Argmax over the corrected scores; ties break toward the lowest class.
pub fn corrected_predict(row: &[f64], xi: &SelectionVector, map: &CorrectionMap) -> usize {
    argmax(&corrected_scores(row, xi, map))
}

/// Per-class accuracy of the corrected predictions over a whole set.
/// Strict: every class must appear in the labels, otherwise the resulting
/// vector would silently mix real and vacuous accuracies.
pub fn corrected_class_accuracy(
    set: &LabeledPredictionSet,
    xi: &SelectionVector,
    map: &CorrectionMap,
) -> Result<ClassAccuracyVector, CorrectionError> {
    if xi.n_classes() != set.n_classes() {
        return Err(CorrectionError::ClassCountMismatch {
            xi: xi.n_classes(),
            classes: set.n_classes(),
        });
    }
    let predictions: Vec<usize> = (0..set.n_instances())
        .map(|m| corrected_predict(set.prob_row(m), xi, map))
        .collect();
    Ok(per_class_accuracy(set, &predictions, true)?)
}
