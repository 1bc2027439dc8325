use std::collections::HashSet;

use rand::RngCore;
use rayon::prelude::*;

use super::config::{Cell, DatasetSource, ExperimentConfig};
use super::synth;
use crate::corpus::{self, Corpus, GoldOracle, Label, SparseVector, Vocabulary};
use crate::crowd::{annotate_pairs, BudgetLedger, LabelStore};
use crate::error::{Error, Result};
use crate::model::{self, Hyperparams, LinearModel, ModelRegistry, TrainingSet};
use crate::rng::{self, Stream};
use crate::screening::{compute_metrics, decide_all, ClassMetrics, ScreeningDecision};
use crate::strategies::{select_batch, select_top_k, PairScore, ProbTable, Strategy, StrategyConfig, StrategyKind};
use crate::Pair;

/// The vectorized finite pool shared by every run of an experiment.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub corpus: Corpus,
    pub vocabulary: Vocabulary,
    pub vectors: Vec<SparseVector>,
}

impl Dataset {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let corpus = match &config.dataset {
            DatasetSource::Csv(path) => corpus::load_corpus(path, &config.predicates.ids())?,
            DatasetSource::Synthetic(s) => synth::generate(s)?,
        };
        if corpus.predicate_ids() != config.predicates.ids().as_slice() {
            return Err(Error::Config("dataset predicates do not match the configured predicates".into()));
        }
        Self::from_corpus(corpus, config.vocabulary)
    }

    pub fn from_corpus(corpus: Corpus, vocab_config: corpus::VocabularyConfig) -> Result<Self> {
        let vocabulary = corpus::build_vocabulary(&corpus, vocab_config)?;
        let vectors = corpus.documents().iter().map(|d| corpus::vectorize(d, &vocabulary)).collect();
        Ok(Dataset {
            corpus,
            vocabulary,
            vectors,
        })
    }

    pub fn gold_items(&self) -> Vec<Label> {
        (0..self.corpus.len()).map(|i| self.corpus.gold_item(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub strategy: StrategyKind,
    pub votes_per_pair: usize,
    pub annotation_proportion: f64,
    pub run_seed: u64,
    pub metrics: ClassMetrics,
    pub budget_spent: u64,
    pub annotated_pairs: usize,
    pub iterations: usize,
}

/// Mutable state of one active-learning run.
#[derive(Debug, Clone)]
pub struct RunState {
    pub labels: LabelStore,
    pub ledger: BudgetLedger,
    pub models: ModelRegistry,
    pub iteration: usize,
    /// Unlabeled pairs, in `(item, predicate)` order.
    pub pool: Vec<Pair>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: MetricsRecord,
    pub state: RunState,
    pub decisions: Vec<ScreeningDecision>,
    /// Pairs picked by the strategy, one entry per iteration.
    pub batches: Vec<Vec<Pair>>,
}

/// Retrains every predicate's classifier from scratch on the current labels.
///
/// A predicate whose labels hold a single class gets a constant model at the
/// Laplace-smoothed IN rate.
pub fn train_models(dataset: &Dataset, labels: &LabelStore, hyperparams: Hyperparams, training_seed: u64) -> Result<ModelRegistry> {
    let ids = dataset.corpus.predicate_ids().to_vec();
    let dim = dataset.vocabulary.len();
    let models = (0..ids.len())
        .into_par_iter()
        .map(|p| {
            let examples: Vec<(SparseVector, Label)> = labels.for_predicate(p).map(|(i, l)| (dataset.vectors[i].clone(), l)).collect();
            let n_in = examples.iter().filter(|(_, l)| l.is_in()).count();
            if n_in == 0 || n_in == examples.len() {
                let prior = (n_in as f64 + 1.0) / (examples.len() as f64 + 2.0);
                return Ok(LinearModel::constant(dim, prior));
            }
            let set = TrainingSet::new(examples)?;
            let hp = Hyperparams {
                seed: training_seed.wrapping_add(p as u64),
                ..hyperparams
            };
            model::train(&set, dim, hp)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut registry = ModelRegistry::new(ids);
    for (p, m) in models.into_iter().enumerate() {
        registry.insert(p, m);
    }
    Ok(registry)
}

/// Pairs allowed under `proportion` of all `(item, predicate)` pairs.
fn pair_cap(dataset: &Dataset, proportion: f64) -> usize {
    let total = dataset.corpus.len() * dataset.corpus.num_predicates();
    // tolerate representation error such as 0.29 * 100
    ((proportion * total as f64) + 1e-9).floor() as usize
}

struct Seeded {
    state: RunState,
    strategy: Strategy,
    crowd_rng: rand_chacha::ChaCha8Rng,
    training_seed: u64,
    cap: usize,
}

fn seed_run(config: &ExperimentConfig, dataset: &Dataset, cell: Cell, run_seed: u64) -> Result<Seeded> {
    let corpus = &dataset.corpus;
    let cap = pair_cap(dataset, cell.annotation_proportion);
    let mut ledger = BudgetLedger::new((cap * cell.votes_per_pair) as u64);
    let mut labels = LabelStore::new();

    let (seed_pairs, pool) = corpus::split_seed(corpus, config.seed_fraction, &mut rng::stream(run_seed, Stream::Split))?;
    if seed_pairs.len() > cap {
        return Err(Error::Config(format!(
            "seed set of {} pairs exceeds the {} pairs allowed by annotationProportion={}",
            seed_pairs.len(),
            cap,
            cell.annotation_proportion
        )));
    }
    let mut crowd_rng = rng::stream(run_seed, Stream::Crowd);
    annotate_pairs(
        &seed_pairs,
        cell.votes_per_pair,
        &config.crowd,
        &mut ledger,
        &mut labels,
        corpus,
        &mut crowd_rng,
    )?;

    let training_seed = rng::stream(run_seed, Stream::Training).next_u64();
    let strategy = Strategy::new(StrategyConfig {
        kind: cell.strategy,
        batch_size: config.batch_size,
        seed: run_seed,
        selection: config.selection,
    })?;
    Ok(Seeded {
        state: RunState {
            labels,
            ledger,
            models: ModelRegistry::new(corpus.predicate_ids().to_vec()),
            iteration: 0,
            pool,
        },
        strategy,
        crowd_rng,
        training_seed,
        cap,
    })
}

/// Runs one active-learning campaign and evaluates the final screening.
///
/// Annotates a stratified seed, then repeatedly retrains, scores the pool and
/// buys votes for the top `batchSize` pairs until the next batch would push
/// the annotated pairs past `annotationProportion` of all pairs, the pool
/// empties, or the budget runs out.
pub fn run_single_detailed(config: &ExperimentConfig, dataset: &Dataset, cell: Cell, run_seed: u64) -> Result<RunOutcome> {
    let Seeded {
        mut state,
        mut strategy,
        mut crowd_rng,
        training_seed,
        cap,
    } = seed_run(config, dataset, cell, run_seed)?;
    let corpus = &dataset.corpus;
    let needs_models = cell.strategy != StrategyKind::Random;
    let mut batches = Vec::new();

    loop {
        let batch_len = config.batch_size.min(state.pool.len());
        if batch_len == 0 || state.labels.len() + batch_len > cap {
            break;
        }
        if needs_models {
            state.models = train_models(dataset, &state.labels, config.hyperparams, training_seed)?;
        }
        let table = if needs_models {
            ProbTable::estimate(corpus, &dataset.vectors, &state.labels, &state.models)?
        } else {
            id_table(corpus)
        };
        let batch: Vec<Pair> = select_batch(&state.pool, &mut strategy, config.batch_size, &table, &state.labels)?
            .into_iter()
            .map(|s| s.pair)
            .collect();
        match annotate_pairs(
            &batch,
            cell.votes_per_pair,
            &config.crowd,
            &mut state.ledger,
            &mut state.labels,
            corpus,
            &mut crowd_rng,
        ) {
            Err(Error::BudgetExhausted { .. }) => break,
            other => other?,
        }
        let picked: HashSet<Pair> = batch.iter().copied().collect();
        state.pool.retain(|p| !picked.contains(p));
        batches.push(batch);
        state.iteration += 1;
        assert!(state.ledger.spent() <= state.ledger.total(), "ledger overdrawn");
    }

    state.models = train_models(dataset, &state.labels, config.hyperparams, training_seed)?;
    let decisions = decide_all(&dataset.vectors, &state.labels, &state.models, config.exclusion_threshold)?;
    let metrics = compute_metrics(&decisions, &dataset.gold_items())?;

    let spent = state.ledger.spent();
    assert_eq!(spent, state.labels.votes_charged(), "ledger disagrees with vote records");
    assert_eq!(spent, (cell.votes_per_pair * state.labels.len()) as u64, "budget not conserved");
    assert!(spent <= state.ledger.total(), "ledger overdrawn");

    Ok(RunOutcome {
        record: MetricsRecord {
            strategy: cell.strategy,
            votes_per_pair: cell.votes_per_pair,
            annotation_proportion: cell.annotation_proportion,
            run_seed,
            metrics,
            budget_spent: spent,
            annotated_pairs: state.labels.len(),
            iterations: state.iteration,
        },
        state,
        decisions,
        batches,
    })
}

pub fn run_single(config: &ExperimentConfig, dataset: &Dataset, cell: Cell, run_seed: u64) -> Result<MetricsRecord> {
    run_single_detailed(config, dataset, cell, run_seed).map(|o| o.record)
}

fn id_table(corpus: &Corpus) -> ProbTable {
    let rows = vec![vec![0.5; corpus.num_predicates()]; corpus.len()];
    ProbTable::new(
        corpus.documents().iter().map(|d| d.id.clone()).collect(),
        corpus.predicate_ids().to_vec(),
        rows,
    )
    .expect("constant table is valid")
}

/// Scores of every pool pair right after the seed set is annotated, ranked
/// as the strategy would select them.
pub fn score_snapshot(config: &ExperimentConfig, dataset: &Dataset, cell: Cell, run_seed: u64) -> Result<(ProbTable, Vec<PairScore>)> {
    let Seeded {
        state,
        mut strategy,
        training_seed,
        ..
    } = seed_run(config, dataset, cell, run_seed)?;
    let models = train_models(dataset, &state.labels, config.hyperparams, training_seed)?;
    let table = ProbTable::estimate(&dataset.corpus, &dataset.vectors, &state.labels, &models)?;
    let scored = strategy.score_pool(&state.pool, &table, &state.labels)?;
    let n = scored.len().max(1);
    let ranked = select_top_k(scored, n, &table, crate::strategies::Selection::GlobalTopK);
    Ok((table, ranked))
}
