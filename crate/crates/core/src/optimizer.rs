//! Search over selection vectors.
//!
//! The search space is {1..|F|}^N: one correction-function choice per class.
//! `anneal` is the workhorse: restarted simulated annealing from the
//! identity selection with geometric cooling and Metropolis acceptance.
//! `exhaustive_search` enumerates the whole space and exists as the ground
//! truth for small instances; the two share one evaluation path, so their
//! objective values are directly comparable.
//!
//! Both searches are anchored: the identity selection is evaluated first
//! and is only ever replaced by a strictly better vector, so the reported
//! best can never be worse than leaving the predictions alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correction::{
    corrected_class_accuracy, CorrectionError, CorrectionMap, SelectionVector,
};
use crate::dataset::{DatasetError, LabeledPredictionSet};
use crate::metrics::{metrics_report, ClassAccuracyVector, MetricsError, MetricsReport};

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("bad annealing configuration: {0}")]
    BadConfig(String),
    #[error(
        "search space {functions}^{classes} exceeds the exhaustive budget of {budget} \
         evaluations; use simulated annealing"
    )]
    BudgetExceeded {
        functions: usize,
        classes: usize,
        budget: u128,
    },
    #[error(transparent)]
    Correction(#[from] CorrectionError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// What the search minimizes over the optimization split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Gini,
    Cobias,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Gini => "gini",
            Self::Cobias => "cobias",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub initial_temperature: f64,
    /// Temperature multiplier applied every `steps_per_temperature` steps.
    pub cooling_rate: f64,
    pub steps_per_temperature: usize,
    /// The walk stops once the temperature falls below this.
    pub min_temperature: f64,
    /// Hard per-restart step cap, in case the cooling schedule is set so
    /// slow it would never reach `min_temperature`.
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            cooling_rate: 0.95,
            steps_per_temperature: 50,
            min_temperature: 1e-3,
            max_iterations: 20_000,
            restarts: 3,
            seed: 0,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<(), OptimizerError> {
        let bad = |msg: String| Err(OptimizerError::BadConfig(msg));
        if !self.initial_temperature.is_finite() || self.initial_temperature <= 0.0 {
            return bad(format!(
                "initial temperature must be positive, got {}",
                self.initial_temperature
            ));
        }
        if !self.cooling_rate.is_finite() || self.cooling_rate <= 0.0 || self.cooling_rate >= 1.0 {
            return bad(format!(
                "cooling rate must lie strictly between 0 and 1, got {}",
                self.cooling_rate
            ));
        }
        if self.steps_per_temperature == 0 {
            return bad("steps per temperature must be at least 1".into());
        }
        if !self.min_temperature.is_finite() || self.min_temperature <= 0.0 {
            return bad(format!(
                "minimum temperature must be positive, got {}",
                self.min_temperature
            ));
        }
        if self.min_temperature > self.initial_temperature {
            return bad(format!(
                "minimum temperature {} exceeds initial temperature {}",
                self.min_temperature, self.initial_temperature
            ));
        }
        if self.max_iterations == 0 {
            return bad("max iterations must be at least 1".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        Ok(())
    }
}

/// Outcome of a search. `best_objective <= initial_objective` always holds;
/// the trace records `(evaluation_count, best_so_far)` at every improvement,
/// starting with the identity anchor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub best_xi: SelectionVector,
    pub best_objective: f64,
    pub initial_objective: f64,
    pub evaluations: u64,
    pub objective_trace: Vec<(u64, f64)>,
}

/// Precomputed correction tables: `corrected[k]` holds function k+1 applied
/// to every probability in the set, laid out row-major. Scoring a selection
/// vector is then a gather plus an argmax per instance, independent of how
/// expensive the correction functions are.
struct Evaluator<'a> {
    set: &'a LabeledPredictionSet,
    supports: Vec<usize>,
    corrected: Vec<Vec<f64>>,
}

impl<'a> Evaluator<'a> {
    fn new(set: &'a LabeledPredictionSet, map: &CorrectionMap) -> Result<Self, OptimizerError> {
        let n = set.n_classes();
        if n < 2 {
            return Err(MetricsError::TooFewClasses { min: 2, got: n }.into());
        }
        let mut supports = vec![0usize; n];
        for &label in set.labels() {
            supports[label] += 1;
        }
        if let Some(class) = supports.iter().position(|&s| s == 0) {
            return Err(DatasetError::MissingClass { class }.into());
        }
        let corrected = map
            .functions()
            .iter()
            .map(|f| {
                let mut table = Vec::with_capacity(set.n_instances() * n);
                for m in 0..set.n_instances() {
                    for &p in set.prob_row(m) {
                        table.push(f.evaluate(p));
                    }
                }
                table
            })
            .collect();
        Ok(Self {
            set,
            supports,
            corrected,
        })
    }

    fn class_accuracy(&self, xi: &SelectionVector) -> ClassAccuracyVector {
        let n = self.set.n_classes();
        let choices = xi.indices();
        let mut correct = vec![0usize; n];
        for m in 0..self.set.n_instances() {
            let base = m * n;
            let mut best = 0usize;
            let mut best_score = self.corrected[choices[0] - 1][base];
            for (i, &choice) in choices.iter().enumerate().skip(1) {
                let score = self.corrected[choice - 1][base + i];
                if score > best_score {
                    best_score = score;
                    best = i;
                }
            }
            let label = self.set.labels()[m];
            if best == label {
                correct[label] += 1;
            }
        }
        let accuracies = correct
            .iter()
            .zip(&self.supports)
            .map(|(&c, &s)| c as f64 / s as f64)
            .collect();
        ClassAccuracyVector::new(accuracies, self.supports.clone())
            .expect("count ratios over positive supports are valid accuracies")
    }

    fn objective(&self, xi: &SelectionVector, objective: Objective) -> f64 {
        score_accuracy(&self.class_accuracy(xi), objective)
    }
}

/// Objective value of an accuracy vector. A gini that is undefined (mean
/// accuracy zero) scores 1.0, strictly worse than any attainable gini, so
/// the search treats "nothing is ever right" as the worst state. Requires
/// at least two classes, which every search entry point has checked.
fn score_accuracy(accuracy: &ClassAccuracyVector, objective: Objective) -> f64 {
    match objective {
        Objective::Gini => accuracy.gini().unwrap_or(1.0),
        Objective::Cobias => accuracy
            .cobias()
            .expect("search requires at least two classes"),
    }
}

/// Objective value of one selection vector over a set, via the same scoring
/// rule the searches use.
pub fn objective_value(
    set: &LabeledPredictionSet,
    xi: &SelectionVector,
    map: &CorrectionMap,
    objective: Objective,
) -> Result<f64, OptimizerError> {
    if set.n_classes() < 2 {
        return Err(MetricsError::TooFewClasses {
            min: 2,
            got: set.n_classes(),
        }
        .into());
    }
    let accuracy = corrected_class_accuracy(set, xi, map)?;
    Ok(score_accuracy(&accuracy, objective))
}

/// Uniformly re-pick one position of the selection to a different function
/// index. With a single-function map there is no different index, so the
/// selection comes back unchanged.
pub fn neighbor(
    xi: &SelectionVector,
    map: &CorrectionMap,
    rng: &mut impl Rng,
) -> SelectionVector {
    if map.len() < 2 {
        return xi.clone();
    }
    let mut indices = xi.indices().to_vec();
    let pos = rng.random_range(0..indices.len());
    let current = indices[pos];
    let mut pick = rng.random_range(1..map.len());
    if pick >= current {
        pick += 1;
    }
    indices[pos] = pick;
    SelectionVector::new(indices, map).expect("neighbor stays within the map")
}

/// Restarted simulated annealing, minimizing `objective` over selection
/// vectors. Every restart walks from the identity selection; a worsening
/// move of size d is accepted with probability exp(-d / temperature). The
/// merged best over all restarts is returned, first achiever winning ties.
/// Deterministic in the config seed.
pub fn anneal(
    set: &LabeledPredictionSet,
    map: &CorrectionMap,
    objective: Objective,
    config: &AnnealConfig,
) -> Result<OptimizationResult, OptimizerError> {
    config.validate()?;
    let evaluator = Evaluator::new(set, map)?;
    let identity = SelectionVector::identity(set.n_classes());
    let initial_objective = evaluator.objective(&identity, objective);
    let mut evaluations: u64 = 1;
    let mut trace = vec![(evaluations, initial_objective)];
    let mut best_xi = identity.clone();
    let mut best_objective = initial_objective;

    // Sub-seed each restart from a master stream so restarts are
    // decorrelated and adding restarts never replays an earlier walk.
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let mut current = identity.clone();
        let mut current_objective = initial_objective;
        let mut temperature = config.initial_temperature;
        let mut steps_at_temperature = 0;
        for _ in 0..config.max_iterations {
            if temperature < config.min_temperature {
                break;
            }
            let candidate = neighbor(&current, map, &mut rng);
            let candidate_objective = evaluator.objective(&candidate, objective);
            evaluations += 1;
            let delta = candidate_objective - current_objective;
            let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
            if accept {
                current = candidate;
                current_objective = candidate_objective;
                if current_objective < best_objective {
                    best_objective = current_objective;
                    best_xi = current.clone();
                    trace.push((evaluations, best_objective));
                }
            }
            steps_at_temperature += 1;
            if steps_at_temperature == config.steps_per_temperature {
                temperature *= config.cooling_rate;
                steps_at_temperature = 0;
            }
        }
    }
    Ok(OptimizationResult {
        best_xi,
        best_objective,
        initial_objective,
        evaluations,
        objective_trace: trace,
    })
}

pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 1_000_000;

pub fn exhaustive_search(
    set: &LabeledPredictionSet,
    map: &CorrectionMap,
    objective: Objective,
) -> Result<OptimizationResult, OptimizerError> {
    exhaustive_search_with_budget(set, map, objective, DEFAULT_EXHAUSTIVE_BUDGET)
}

/// Enumerate every selection vector in lexicographic order (rightmost class
/// varies fastest) and keep the strictly best, which makes the reported
/// optimum the lexicographically smallest among ties. The enumeration
/// starts at the identity selection, so the anchor property holds here too.
pub fn exhaustive_search_with_budget(
    set: &LabeledPredictionSet,
    map: &CorrectionMap,
    objective: Objective,
    budget: u128,
) -> Result<OptimizationResult, OptimizerError> {
    let evaluator = Evaluator::new(set, map)?;
    let n = set.n_classes();
    let within_budget = (map.len() as u128)
        .checked_pow(n as u32)
        .is_some_and(|space| space <= budget);
    if !within_budget {
        return Err(OptimizerError::BudgetExceeded {
            functions: map.len(),
            classes: n,
            budget,
        });
    }

    let mut indices = vec![1usize; n];
    let mut evaluations: u64 = 0;
    let mut trace = Vec::new();
    let mut best: Option<(SelectionVector, f64)> = None;
    let mut initial_objective = f64::NAN;
    loop {
        let xi = SelectionVector::new(indices.clone(), map)
            .expect("odometer stays within the map");
        let value = evaluator.objective(&xi, objective);
        evaluations += 1;
        if evaluations == 1 {
            initial_objective = value;
        }
        let improved = match &best {
            None => true,
            Some((_, incumbent)) => value < *incumbent,
        };
        if improved {
            trace.push((evaluations, value));
            best = Some((xi, value));
        }

        let mut pos = n;
        let exhausted = loop {
            if pos == 0 {
                break true;
            }
            pos -= 1;
            if indices[pos] < map.len() {
                indices[pos] += 1;
                break false;
            }
            indices[pos] = 1;
        };
        if exhausted {
            let (best_xi, best_objective) = best.expect("at least one vector evaluated");
            return Ok(OptimizationResult {
                best_xi,
                best_objective,
                initial_objective,
                evaluations,
                objective_trace: trace,
            });
        }
    }
}

/// Metrics report of the corrected predictions on a held-out set.
pub fn evaluate_on_test(
    test: &LabeledPredictionSet,
    xi: &SelectionVector,
    map: &CorrectionMap,
) -> Result<MetricsReport, OptimizerError> {
    let accuracy = corrected_class_accuracy(test, xi, map)?;
    Ok(metrics_report(&accuracy)?)
}
