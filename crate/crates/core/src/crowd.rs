//! Simulated crowd annotation with majority-vote aggregation and budget
//! accounting.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::corpus::{Corpus, GoldOracle, Label};
use crate::error::{Error, Result};
use crate::Pair;

/// Per-vote worker accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AccuracyModel {
    /// Every worker answers correctly with this probability.
    Point(f64),
    /// Worker accuracy drawn from `Beta(alpha, beta)` restricted to `(0.5, 1]`.
    Beta { alpha: f64, beta: f64 },
}

impl AccuracyModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AccuracyModel::Point(a) if a > 0.0 && a <= 1.0 => Ok(()),
            AccuracyModel::Point(a) => Err(Error::invalid("accuracy", format!("{a} is outside (0, 1]"))),
            AccuracyModel::Beta { alpha, beta } if alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite() => Ok(()),
            AccuracyModel::Beta { .. } => Err(Error::invalid("accuracy", "beta parameters must be positive")),
        }
    }

    /// Draws one worker's accuracy. Beta draws are resampled until they land
    /// in `(0.5, 1]`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AccuracyModel::Point(a) => a,
            AccuracyModel::Beta { alpha, beta } => {
                let dist = Beta::new(alpha, beta).expect("validated beta parameters");
                loop {
                    let a = dist.sample(rng);
                    if a > 0.5 {
                        return a;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrowdModel {
    per_predicate: Vec<AccuracyModel>,
}

impl CrowdModel {
    pub fn new(per_predicate: Vec<AccuracyModel>) -> Result<Self> {
        for m in &per_predicate {
            m.validate()?;
        }
        Ok(CrowdModel { per_predicate })
    }

    /// Noise-free single-answer annotators.
    pub fn expert(num_predicates: usize) -> Self {
        CrowdModel {
            per_predicate: vec![AccuracyModel::Point(1.0); num_predicates],
        }
    }

    pub fn model(&self, predicate: usize) -> &AccuracyModel {
        &self.per_predicate[predicate]
    }

    pub fn num_predicates(&self) -> usize {
        self.per_predicate.len()
    }
}

/// `n` independent votes on a pair whose true label is `gold`; each vote comes
/// from a fresh worker.
pub fn simulate_votes<R: Rng + ?Sized>(gold: Label, n: usize, model: &AccuracyModel, rng: &mut R) -> Vec<Label> {
    (0..n)
        .map(|_| {
            let accuracy = model.draw(rng);
            if rng.random::<f64>() < accuracy {
                gold
            } else {
                gold.flipped()
            }
        })
        .collect()
}

/// Strict majority; an exact tie resolves to IN.
pub fn aggregate_majority(votes: &[Label]) -> Result<Label> {
    if votes.is_empty() {
        return Err(Error::EmptyVotes);
    }
    let n_in = votes.iter().filter(|v| v.is_in()).count();
    Ok(Label::from_bool(2 * n_in >= votes.len()))
}

/// Probability that a strict majority of `n` independent votes, each correct
/// with probability `accuracy`, is correct (ties counted as half correct).
pub fn majority_accuracy(accuracy: f64, n: usize) -> f64 {
    let mut total = 0.0;
    for j in 0..=n {
        let p = binomial(n, j) * accuracy.powi(j as i32) * (1.0 - accuracy).powi((n - j) as i32);
        if 2 * j > n {
            total += p;
        } else if 2 * j == n {
            total += 0.5 * p;
        }
    }
    total
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoteRecord {
    pub pair: Pair,
    pub votes: Vec<Label>,
    pub aggregated: Label,
    pub votes_charged: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetLedger {
    total_votes_allowed: u64,
    votes_spent: u64,
}

impl BudgetLedger {
    pub fn new(total_votes_allowed: u64) -> Self {
        BudgetLedger {
            total_votes_allowed,
            votes_spent: 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.total_votes_allowed
    }

    pub fn spent(&self) -> u64 {
        self.votes_spent
    }

    pub fn remaining(&self) -> u64 {
        self.total_votes_allowed - self.votes_spent
    }

    pub fn can_afford(&self, votes: u64) -> bool {
        votes <= self.remaining()
    }

    pub fn charge(&mut self, votes: u64) -> Result<()> {
        if !self.can_afford(votes) {
            return Err(Error::BudgetExhausted {
                requested: votes,
                remaining: self.remaining(),
            });
        }
        self.votes_spent += votes;
        Ok(())
    }
}

/// Aggregated crowd labels, at most one record per pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabelStore {
    records: BTreeMap<Pair, VoteRecord>,
}

impl LabelStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, pair: Pair) -> Option<&VoteRecord> {
        self.records.get(&pair)
    }

    pub fn label(&self, pair: Pair) -> Option<Label> {
        self.records.get(&pair).map(|r| r.aggregated)
    }

    pub fn contains(&self, pair: Pair) -> bool {
        self.records.contains_key(&pair)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in `(item, predicate)` order.
    pub fn records(&self) -> impl Iterator<Item = &VoteRecord> {
        self.records.values()
    }

    /// Labeled pairs for one predicate, in item order.
    pub fn for_predicate(&self, predicate: usize) -> impl Iterator<Item = (usize, Label)> + '_ {
        self.records
            .values()
            .filter(move |r| r.pair.predicate == predicate)
            .map(|r| (r.pair.item, r.aggregated))
    }

    pub fn votes_charged(&self) -> u64 {
        self.records.values().map(|r| r.votes_charged).sum()
    }

    /// Inserts a record directly, bypassing the crowd and the ledger.
    /// Intended for tests and for replaying externally collected labels.
    pub fn insert(&mut self, record: VoteRecord) {
        self.records.insert(record.pair, record);
    }

    /// Vote log CSV: `itemId,predicateId,voteIndex,vote,aggregated`.
    pub fn write_vote_log<W: Write>(&self, corpus: &Corpus, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["itemId", "predicateId", "voteIndex", "vote", "aggregated"])?;
        for r in self.records.values() {
            for (k, v) in r.votes.iter().enumerate() {
                w.write_record([
                    corpus.item_id(r.pair.item),
                    &corpus.predicate_ids()[r.pair.predicate],
                    &k.to_string(),
                    &v.to_string(),
                    &r.aggregated.to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

/// Buys `votes_per_pair` simulated votes for every pair and stores the
/// majority label.
///
/// All-or-nothing: if any pair is already labeled (or repeated) or the ledger
/// cannot cover the whole request, nothing is charged or recorded.
#[allow(clippy::too_many_arguments)]
pub fn annotate_pairs<O: GoldOracle + ?Sized, R: Rng + ?Sized>(
    pairs: &[Pair],
    votes_per_pair: usize,
    crowd: &CrowdModel,
    ledger: &mut BudgetLedger,
    labels: &mut LabelStore,
    oracle: &O,
    rng: &mut R,
) -> Result<()> {
    if votes_per_pair == 0 {
        return Err(Error::invalid("votesPerPair", "must be at least 1"));
    }
    let mut seen = HashSet::with_capacity(pairs.len());
    for &pair in pairs {
        if labels.contains(pair) || !seen.insert(pair) {
            let (item, predicate) = oracle.describe(pair);
            return Err(Error::AlreadyLabeled { item, predicate });
        }
    }
    let cost = (pairs.len() * votes_per_pair) as u64;
    ledger.charge(cost)?;

    for &pair in pairs {
        let votes = simulate_votes(
            oracle.gold(pair.item, pair.predicate),
            votes_per_pair,
            crowd.model(pair.predicate),
            rng,
        );
        let aggregated = aggregate_majority(&votes)?;
        labels.insert(VoteRecord {
            pair,
            votes,
            aggregated,
            votes_charged: votes_per_pair as u64,
        });
    }
    Ok(())
}
