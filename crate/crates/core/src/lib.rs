//! Multi-predicate document screening with active learning.
//!
//! A document is relevant only when it satisfies every predicate in a
//! [`PredicateSet`]. One probabilistic linear classifier is trained per
//! predicate from crowd-annotated `(item, predicate)` pairs, and an active
//! learning strategy decides which pairs to buy annotations for next:
//!
//! - [`StrategyKind::Random`]: uniform random pairs.
//! - [`StrategyKind::Uncertainty`]: pairs closest to their classifier's
//!   decision boundary.
//! - [`StrategyKind::ObjectiveAware`]: boundary distance of the target
//!   predicate weighted by the probability that every *other* predicate holds,
//!   so annotation effort goes where it can change the final screening
//!   outcome.
//!
//! The [`harness`] module runs the whole loop against a simulated crowd and
//! sweeps grids of strategies, vote counts and annotation proportions.

pub mod corpus;
pub mod crowd;
mod error;
pub mod harness;
pub mod model;
pub mod rng;
pub mod screening;
pub mod strategies;

pub use corpus::{Corpus, Document, Label, SparseVector, Vocabulary, VocabularyConfig};
pub use crowd::{AccuracyModel, BudgetLedger, CrowdModel, LabelStore, VoteRecord};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, MetricsRecord};
pub use model::{Hyperparams, LinearModel, ModelRegistry, TrainingSet};
pub use screening::{PredicateSet, ScreeningDecision};
pub use strategies::{PairScore, ProbTable, StrategyConfig, StrategyKind};

/// An `(item, predicate)` pair addressed by position in the corpus and
/// predicate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub item: usize,
    pub predicate: usize,
}

impl Pair {
    pub fn new(item: usize, predicate: usize) -> Self {
        Pair { item, predicate }
    }
}
