//! Scoring and selection of `(item, predicate)` pairs for annotation.
//!
//! Objective-aware scoring multiplies the target predicate's uncertainty by
//! the probability that every other predicate holds:
//!
//! ```text
//! score(i, p̄) = (1 - max(P_p̄, 1 - P_p̄)) · Π_{p ≠ p̄} P_p
//! ```
//!
//! A pair whose item is almost surely excluded by some other predicate scores
//! near zero however uncertain the target classifier is, because a mistake on
//! it cannot change the item's final screening outcome.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SparseVector};
use crate::crowd::LabelStore;
use crate::error::{Error, Result};
use crate::model::ModelRegistry;
use crate::rng::{self, Stream};
use crate::Pair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    ObjectiveAware,
    Random,
    Uncertainty,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::ObjectiveAware, StrategyKind::Random, StrategyKind::Uncertainty];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::ObjectiveAware => "objective-aware",
            StrategyKind::Random => "random",
            StrategyKind::Uncertainty => "uncertainty",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid("strategy", format!("unknown strategy `{s}`")))
    }
}

/// How the top-k batch is drawn from the scored pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Highest `k` scores across all predicates.
    #[default]
    GlobalTopK,
    /// Alternate between predicates, taking each one's best remaining pair.
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub batch_size: usize,
    pub seed: u64,
    pub selection: Selection,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, batch_size: usize, seed: u64) -> Self {
        StrategyConfig {
            kind,
            batch_size,
            seed,
            selection: Selection::GlobalTopK,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    pub pair: Pair,
    pub score: f64,
}

/// Snapshot of `Prob(i_p ∈ IN)` for every pair, with the ids used for
/// deterministic tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTable {
    item_ids: Vec<String>,
    predicate_ids: Vec<String>,
    probs: Vec<f64>,
}

impl ProbTable {
    /// `rows[i][p]` is the IN probability of item `i` for predicate `p`.
    pub fn new(item_ids: Vec<String>, predicate_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != item_ids.len() {
            return Err(Error::Config(format!("{} rows for {} items", rows.len(), item_ids.len())));
        }
        let mut probs = Vec::with_capacity(rows.len() * predicate_ids.len());
        for row in rows {
            if row.len() != predicate_ids.len() {
                return Err(Error::Config(format!(
                    "row has {} entries for {} predicates",
                    row.len(),
                    predicate_ids.len()
                )));
            }
            for p in row {
                check_prob(p)?;
                probs.push(p);
            }
        }
        Ok(ProbTable {
            item_ids,
            predicate_ids,
            probs,
        })
    }

    /// Evaluates [`estimate_in_probability`] over the whole pool.
    pub fn estimate(corpus: &Corpus, vectors: &[SparseVector], labels: &LabelStore, models: &ModelRegistry) -> Result<Self> {
        let np = corpus.num_predicates();
        let mut probs = Vec::with_capacity(corpus.len() * np);
        for (i, x) in vectors.iter().enumerate() {
            for p in 0..np {
                probs.push(estimate_in_probability(Pair::new(i, p), x, labels, models)?);
            }
        }
        Ok(ProbTable {
            item_ids: corpus.documents().iter().map(|d| d.id.clone()).collect(),
            predicate_ids: corpus.predicate_ids().to_vec(),
            probs,
        })
    }

    pub fn prob(&self, pair: Pair) -> f64 {
        self.probs[pair.item * self.predicate_ids.len() + pair.predicate]
    }

    pub fn row(&self, item: usize) -> &[f64] {
        let np = self.predicate_ids.len();
        &self.probs[item * np..(item + 1) * np]
    }

    pub fn num_items(&self) -> usize {
        self.item_ids.len()
    }

    pub fn num_predicates(&self) -> usize {
        self.predicate_ids.len()
    }

    pub fn item_id(&self, item: usize) -> &str {
        &self.item_ids[item]
    }

    pub fn predicate_id(&self, predicate: usize) -> &str {
        &self.predicate_ids[predicate]
    }

    /// Every pair of the table, in `(item, predicate)` order.
    pub fn all_pairs(&self) -> Vec<Pair> {
        (0..self.num_items())
            .flat_map(|i| (0..self.num_predicates()).map(move |p| Pair::new(i, p)))
            .collect()
    }

    fn pair_order(&self, a: Pair, b: Pair) -> Ordering {
        self.item_ids[a.item]
            .cmp(&self.item_ids[b.item])
            .then_with(|| self.predicate_ids[a.predicate].cmp(&self.predicate_ids[b.predicate]))
    }
}

fn check_prob(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

/// A crowd label for the pair, when present, overrides the model: 1.0 for IN
/// and 0.0 for OUT.
pub fn estimate_in_probability(pair: Pair, x: &SparseVector, labels: &LabelStore, models: &ModelRegistry) -> Result<f64> {
    let model = models.get(pair.predicate)?;
    match labels.label(pair) {
        Some(l) => Ok(l.as_prob()),
        None => model.predict_proba(x),
    }
}

/// `1 - max(p, 1 - p)`.
pub fn uncertainty_score(prob_in: f64) -> Result<f64> {
    let p = check_prob(prob_in)?;
    Ok(1.0 - p.max(1.0 - p))
}

pub fn objective_aware_score(target_prob_in: f64, other_probs_in: &[f64]) -> Result<f64> {
    let mut inclusion = 1.0;
    for &p in other_probs_in {
        inclusion *= check_prob(p)?;
    }
    Ok(uncertainty_score(target_prob_in)? * inclusion)
}

/// Uniform in `[0, 1)`.
pub fn random_score<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

/// A configured sampler with its own random stream.
#[derive(Debug, Clone)]
pub struct Strategy {
    config: StrategyConfig,
    rng: ChaCha8Rng,
}

impl Strategy {
    pub fn new(config: StrategyConfig) -> Result<Self> {
        if config.batch_size == 0 {
            return Err(Error::invalid("batchSize", "must be at least 1"));
        }
        Ok(Strategy {
            rng: rng::stream(config.seed, Stream::Strategy),
            config,
        })
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.config
    }

    pub fn kind(&self) -> StrategyKind {
        self.config.kind
    }

    pub fn score(&mut self, pair: Pair, table: &ProbTable) -> Result<f64> {
        match self.config.kind {
            StrategyKind::Random => Ok(random_score(&mut self.rng)),
            StrategyKind::Uncertainty => uncertainty_score(table.prob(pair)),
            StrategyKind::ObjectiveAware => {
                let row = table.row(pair.item);
                let others: Vec<f64> = row
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != pair.predicate)
                    .map(|(_, &v)| v)
                    .collect();
                objective_aware_score(row[pair.predicate], &others)
            }
        }
    }

    /// Scores every unlabeled pool pair, in pool order.
    pub fn score_pool(&mut self, pool: &[Pair], table: &ProbTable, labels: &LabelStore) -> Result<Vec<PairScore>> {
        pool.iter()
            .filter(|&&pair| !labels.contains(pair))
            .map(|&pair| {
                Ok(PairScore {
                    pair,
                    score: self.score(pair, table)?,
                })
            })
            .collect()
    }
}

/// Picks at most `k` pairs from the unlabeled part of `pool`.
///
/// Returns fewer than `k` only when fewer unlabeled pairs remain.
pub fn select_batch(pool: &[Pair], strategy: &mut Strategy, k: usize, table: &ProbTable, labels: &LabelStore) -> Result<Vec<PairScore>> {
    if k == 0 {
        return Err(Error::invalid("batchSize", "must be at least 1"));
    }
    let scored = strategy.score_pool(pool, table, labels)?;
    Ok(select_top_k(scored, k, table, strategy.config.selection))
}

/// The selection reduction: highest score first, ties broken by ascending
/// `(item id, predicate id)`. Duplicate pairs in the input are kept once.
pub fn select_top_k(mut scored: Vec<PairScore>, k: usize, table: &ProbTable, selection: Selection) -> Vec<PairScore> {
    let cmp = |a: &PairScore, b: &PairScore| b.score.total_cmp(&a.score).then_with(|| table.pair_order(a.pair, b.pair));
    scored.sort_by_key(|s| s.pair);
    scored.dedup_by_key(|s| s.pair);
    match selection {
        Selection::GlobalTopK => {
            if scored.len() > k {
                scored.select_nth_unstable_by(k - 1, cmp);
                scored.truncate(k);
            }
            scored.sort_by(cmp);
            scored
        }
        Selection::RoundRobin => {
            let mut buckets: Vec<Vec<PairScore>> = vec![Vec::new(); table.num_predicates()];
            for s in scored {
                buckets[s.pair.predicate].push(s);
            }
            for b in &mut buckets {
                b.sort_by(|x, y| cmp(y, x));
            }
            let mut out = Vec::with_capacity(k);
            while out.len() < k {
                let before = out.len();
                for b in buckets.iter_mut() {
                    if out.len() == k {
                        break;
                    }
                    if let Some(s) = b.pop() {
                        out.push(s);
                    }
                }
                if out.len() == before {
                    break;
                }
            }
            out
        }
    }
}
