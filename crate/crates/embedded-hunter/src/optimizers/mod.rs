//! The optimizer family: the hierarchical-bandit embedded search, the SOO
//! tree search it extends, the multiple-run embedding comparators, and a
//! random-search baseline, all under one contract: `(objective, config) ->
//! RunResult`.

use crate::embedding::MatrixTag;
use crate::partition::PartitionError;
use crate::spaces::{LowPoint, SpaceError};
use thiserror::Error;

mod eh;
mod random_search;
mod resoo;
mod soo;
mod sresoo;

pub use eh::{
    embedded_hunter, embedded_hunter_traced, embedded_hunter_with_tree, run_embedded_hunter,
};
pub use random_search::random_search;
pub use resoo::resoo;
pub use soo::{run_soo, soo};
pub use sresoo::sresoo;

/// Stream ids reserved per purpose, so independent parts of a run never
/// share randomness.
pub(crate) const STREAM_OPTIMIZER: u64 = 1;
pub(crate) const STREAM_RESOO_BASE: u64 = 0x100;
pub(crate) const STREAM_SRESOO_BASE: u64 = 0x200;

#[derive(Debug, Error, PartialEq)]
pub enum OptimizerError {
    #[error("evaluation budget must be at least 1")]
    EmptyBudget,
    #[error("partition factor K must be an odd integer >= 3, got {0}")]
    BadPartitionFactor(usize),
    #[error("h_max must be at least 1")]
    BadMaxDepth,
    #[error("eta must lie in (0,1), got {0}")]
    BadEta(f64),
    #[error("embedding factor M must be at least 1")]
    BadEmbeddingFactor,
    #[error("budget {budget} is smaller than the number of embeddings {m}")]
    BudgetBelowEmbeddings { budget: u64, m: u64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Shared optimizer parameters; defaults follow the standard experiment grid
/// (`v = 10^4`, `d = 10`, `M = 5`, `eta = 0.3`, `K = 3`,
/// `h_max = floor(sqrt(v))`).
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Evaluation budget `v`.
    pub budget: u64,
    /// Partition factor; must be odd so the center child can share its
    /// parent's base point.
    pub k: usize,
    /// Maximum depth expanded; nodes at `h_max` stay selectable leaves.
    pub h_max: usize,
    /// Multiplicative factor capping per-base-point evaluations at `M * |y|`.
    pub m: u64,
    /// Low-space bound parameter; the search space is `[-d/eta, d/eta]^d`.
    pub eta: f64,
    /// Search (low) dimension.
    pub d: usize,
    pub seed: u64,
}

/// `floor(sqrt(v))`, at least 1: the default tree depth for a budget.
pub fn default_h_max(budget: u64) -> usize {
    ((budget as f64).sqrt().floor() as usize).max(1)
}

impl OptimizerConfig {
    pub fn new(budget: u64, d: usize, seed: u64) -> Self {
        Self {
            budget,
            k: 3,
            h_max: default_h_max(budget),
            m: 5,
            eta: 0.3,
            d,
            seed,
        }
    }

    /// The full default configuration used by the experiment harness.
    pub fn table_defaults(seed: u64) -> Self {
        Self::new(10_000, 10, seed)
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.budget < 1 {
            return Err(OptimizerError::EmptyBudget);
        }
        if self.k < 3 || self.k % 2 == 0 {
            return Err(OptimizerError::BadPartitionFactor(self.k));
        }
        if self.h_max < 1 {
            return Err(OptimizerError::BadMaxDepth);
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(OptimizerError::BadEta(self.eta));
        }
        if self.m < 1 {
            return Err(OptimizerError::BadEmbeddingFactor);
        }
        Ok(())
    }
}

/// The best evaluation a run found, with enough provenance to reconstruct
/// the high-dimensional point.
#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    /// Low-dimensional point of the best evaluation (for tree searches).
    pub low: Vec<f64>,
    /// Projection-matrix provenance, when the evaluation went through one.
    pub matrix: Option<MatrixTag>,
    /// The high-dimensional point, when the optimizer holds it directly.
    pub high: Option<Vec<f64>>,
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_value: f64,
    /// Best-so-far value indexed by evaluations consumed; recorded at every
    /// improvement, so values are nonincreasing.
    pub curve: Vec<(u64, f64)>,
    pub evaluations_used: u64,
    pub iterations: u64,
    pub incumbent: Option<Incumbent>,
    /// True when the run returned before consuming its budget because no
    /// further expansion was structurally possible.
    pub stopped_early: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceAction {
    Init,
    Select,
    Expand,
    EvalChild,
    InheritChild,
}

/// One step of an optimizer run, for the trace-oracle tests.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub t: u64,
    pub depth: usize,
    pub index: u128,
    pub action: TraceAction,
}

pub type TraceSink<'a> = &'a mut dyn FnMut(TraceEvent);

/// A budgeted source of low-dimensional evaluations.
///
/// `evaluate` returns `None` once the budget is exhausted; callers must then
/// stop cleanly.
pub trait LowEval {
    fn evaluate(&mut self, y: &LowPoint) -> Option<(f64, Option<MatrixTag>)>;
    fn used(&self) -> u64;
    fn budget(&self) -> u64;
    fn exhausted(&self) -> bool {
        self.used() >= self.budget()
    }
}

impl LowEval for crate::embedding::StochasticObjective<'_> {
    fn evaluate(&mut self, y: &LowPoint) -> Option<(f64, Option<MatrixTag>)> {
        StochasticObjective::evaluate(self, y)
            .ok()
            .map(|rec| (rec.value, Some(rec.matrix)))
    }

    fn used(&self) -> u64 {
        StochasticObjective::used(self)
    }

    fn budget(&self) -> u64 {
        StochasticObjective::budget(self)
    }
}

use crate::embedding::StochasticObjective;

/// A deterministic budgeted function; also serves as the identity-projection
/// test hook for the tree searches.
pub struct BudgetedFn<F: FnMut(&[f64]) -> f64> {
    f: F,
    used: u64,
    budget: u64,
}

impl<F: FnMut(&[f64]) -> f64> BudgetedFn<F> {
    pub fn new(f: F, budget: u64) -> Self {
        Self { f, used: 0, budget }
    }
}

impl<F: FnMut(&[f64]) -> f64> LowEval for BudgetedFn<F> {
    fn evaluate(&mut self, y: &LowPoint) -> Option<(f64, Option<MatrixTag>)> {
        if self.exhausted() {
            return None;
        }
        self.used += 1;
        Some(((self.f)(y.coords()), None))
    }

    fn used(&self) -> u64 {
        self.used
    }

    fn budget(&self) -> u64 {
        self.budget
    }
}

/// Best-so-far bookkeeping shared by all optimizers.
pub(crate) struct BestTracker {
    pub best: f64,
    pub curve: Vec<(u64, f64)>,
    pub incumbent: Option<Incumbent>,
}

impl BestTracker {
    pub fn new() -> Self {
        Self {
            best: f64::INFINITY,
            curve: Vec::new(),
            incumbent: None,
        }
    }

    /// Record one evaluation; returns true when it improved the best.
    pub fn observe(&mut self, evals_used: u64, value: f64) -> bool {
        if value < self.best {
            self.best = value;
            self.curve.push((evals_used, value));
            true
        } else {
            false
        }
    }
}
