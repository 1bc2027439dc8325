//! Experiment configuration: a strict TOML file whose axes (strategy, votes
//! per pair, annotation proportion) may each be a single value or a list.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::synth::SynthConfig;
use crate::corpus::VocabularyConfig;
use crate::crowd::{AccuracyModel, CrowdModel};
use crate::error::{Error, Result};
use crate::model::Hyperparams;
use crate::screening::PredicateSet;
use crate::strategies::{Selection, StrategyKind};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
enum RawAccuracy {
    Point(f64),
    Beta { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawPredicate {
    id: String,
    #[serde(default)]
    text: String,
    accuracy: RawAccuracy,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawClassifier {
    #[serde(default = "default_lambda")]
    l2_lambda: f64,
    #[serde(default = "default_epochs")]
    epochs: usize,
    #[serde(default = "default_learning_rate")]
    learning_rate: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawVocabulary {
    #[serde(default = "default_min_df")]
    min_df: usize,
    #[serde(default = "default_max_features")]
    max_features: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawSynthetic {
    items: usize,
    selectivities: Vec<f64>,
    #[serde(default)]
    seed: u64,
    ambiguity: Option<f64>,
    cue_fidelity: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawConfig {
    dataset_path: Option<PathBuf>,
    synthetic: Option<RawSynthetic>,
    predicates: Vec<RawPredicate>,
    strategy: OneOrMany<StrategyKind>,
    #[serde(default = "default_batch_size")]
    batch_size: usize,
    votes_per_pair: OneOrMany<i64>,
    annotation_proportion: OneOrMany<f64>,
    #[serde(default = "default_seed_fraction")]
    seed_fraction: f64,
    #[serde(default = "default_num_runs")]
    num_runs: i64,
    #[serde(default)]
    base_rng_seed: u64,
    #[serde(default = "default_threshold")]
    exclusion_threshold: f64,
    #[serde(default)]
    selection: Selection,
    classifier: Option<RawClassifier>,
    vocabulary: Option<RawVocabulary>,
}

fn default_lambda() -> f64 {
    Hyperparams::default().l2_lambda
}
fn default_epochs() -> usize {
    Hyperparams::default().epochs
}
fn default_learning_rate() -> f64 {
    Hyperparams::default().learning_rate
}
fn default_min_df() -> usize {
    VocabularyConfig::default().min_df
}
fn default_max_features() -> usize {
    VocabularyConfig::default().max_features
}
fn default_batch_size() -> usize {
    50
}
fn default_seed_fraction() -> f64 {
    0.02
}
fn default_num_runs() -> i64 {
    10
}
fn default_threshold() -> f64 {
    0.5
}

/// Where the finite pool comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Csv(PathBuf),
    Synthetic(SynthConfig),
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub predicates: PredicateSet,
    pub crowd: CrowdModel,
    pub strategies: Vec<StrategyKind>,
    pub batch_size: usize,
    pub votes_per_pair: Vec<usize>,
    pub annotation_proportions: Vec<f64>,
    pub seed_fraction: f64,
    pub num_runs: usize,
    pub base_rng_seed: u64,
    pub hyperparams: Hyperparams,
    pub vocabulary: VocabularyConfig,
    pub exclusion_threshold: f64,
    pub selection: Selection,
}

/// One point of the strategy × votes × proportion grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub strategy: StrategyKind,
    pub votes_per_pair: usize,
    pub annotation_proportion: f64,
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "strategy={} votesPerPair={} annotationProportion={}",
            self.strategy, self.votes_per_pair, self.annotation_proportion
        )
    }
}

impl ExperimentConfig {
    /// A single-cell experiment over a synthetic pool with default settings.
    pub fn synthetic(
        synth: SynthConfig,
        accuracy: AccuracyModel,
        strategy: StrategyKind,
        votes_per_pair: usize,
        proportion: f64,
    ) -> Result<Self> {
        let n = synth.selectivities.len();
        let predicates = PredicateSet::new((1..=n).map(|k| (format!("p{k}"), String::new())).collect())?;
        let cfg = ExperimentConfig {
            dataset: DatasetSource::Synthetic(synth),
            predicates,
            crowd: CrowdModel::new(vec![accuracy; n])?,
            strategies: vec![strategy],
            batch_size: default_batch_size(),
            votes_per_pair: vec![votes_per_pair],
            annotation_proportions: vec![proportion],
            seed_fraction: default_seed_fraction(),
            num_runs: default_num_runs() as usize,
            base_rng_seed: 0,
            hyperparams: Hyperparams::default(),
            vocabulary: VocabularyConfig::default(),
            exclusion_threshold: default_threshold(),
            selection: Selection::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &strategy in &self.strategies {
            for &votes_per_pair in &self.votes_per_pair {
                for &annotation_proportion in &self.annotation_proportions {
                    cells.push(Cell {
                        strategy,
                        votes_per_pair,
                        annotation_proportion,
                    });
                }
            }
        }
        cells
    }

    pub fn run_seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.num_runs as u64).map(|r| self.base_rng_seed.wrapping_add(r))
    }

    pub fn validate(&self) -> Result<()> {
        if self.crowd.num_predicates() != self.predicates.len() {
            return Err(Error::invalid("predicates", "every predicate needs an accuracy model"));
        }
        if self.strategies.is_empty() {
            return Err(Error::invalid("strategy", "at least one strategy is required"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batchSize", "must be at least 1"));
        }
        if self.votes_per_pair.is_empty() || self.votes_per_pair.contains(&0) {
            return Err(Error::invalid("votesPerPair", "must be at least 1"));
        }
        if self.annotation_proportions.is_empty() || self.annotation_proportions.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::invalid("annotationProportion", "must lie in (0, 1]"));
        }
        if !(self.seed_fraction > 0.0 && self.seed_fraction < 1.0) {
            return Err(Error::invalid("seedFraction", "must lie in (0, 1)"));
        }
        if self.num_runs == 0 {
            return Err(Error::invalid("numRuns", "must be at least 1"));
        }
        if !(self.exclusion_threshold > 0.0 && self.exclusion_threshold <= 1.0) {
            return Err(Error::invalid("exclusionThreshold", "must lie in (0, 1]"));
        }
        if self.vocabulary.min_df == 0 {
            return Err(Error::invalid("minDf", "must be at least 1"));
        }
        if self.vocabulary.max_features == 0 {
            return Err(Error::invalid("maxFeatures", "must be at least 1"));
        }
        self.hyperparams.validate()?;
        if let DatasetSource::Synthetic(s) = &self.dataset {
            s.validate()?;
            if s.selectivities.len() != self.predicates.len() {
                return Err(Error::invalid("selectivities", "need one selectivity per predicate"));
            }
        }
        Ok(())
    }
}

/// Reads and validates a config file. Relative `datasetPath` values resolve
/// against the config file's directory.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;

    let dataset = match (raw.dataset_path, raw.synthetic) {
        (Some(p), None) => DatasetSource::Csv(if p.is_absolute() { p } else { base_dir.join(p) }),
        (None, Some(s)) => {
            let mut synth = SynthConfig::new(s.items, s.selectivities, s.seed);
            if let Some(a) = s.ambiguity {
                synth.ambiguity = a;
            }
            if let Some(f) = s.cue_fidelity {
                synth.cue_fidelity = f;
            }
            DatasetSource::Synthetic(synth)
        }
        (Some(_), Some(_)) => return Err(Error::invalid("datasetPath", "give either datasetPath or [synthetic], not both")),
        (None, None) => return Err(Error::invalid("datasetPath", "missing; give datasetPath or a [synthetic] table")),
    };

    let predicates = PredicateSet::new(raw.predicates.iter().map(|p| (p.id.clone(), p.text.clone())).collect())?;
    let crowd = CrowdModel::new(
        raw.predicates
            .iter()
            .map(|p| match p.accuracy {
                RawAccuracy::Point(a) => AccuracyModel::Point(a),
                RawAccuracy::Beta { alpha, beta } => AccuracyModel::Beta { alpha, beta },
            })
            .collect(),
    )?;

    let votes_per_pair = raw
        .votes_per_pair
        .into_vec()
        .into_iter()
        .map(|v| {
            usize::try_from(v)
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| Error::invalid("votesPerPair", format!("{v} is not a positive count")))
        })
        .collect::<Result<Vec<_>>>()?;
    let num_runs = usize::try_from(raw.num_runs)
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::invalid("numRuns", format!("{} is not a positive count", raw.num_runs)))?;

    let classifier = raw.classifier.unwrap_or(RawClassifier {
        l2_lambda: default_lambda(),
        epochs: default_epochs(),
        learning_rate: default_learning_rate(),
    });
    let vocabulary = raw.vocabulary.unwrap_or(RawVocabulary {
        min_df: default_min_df(),
        max_features: default_max_features(),
    });

    let mut strategies = raw.strategy.into_vec();
    strategies.dedup();

    let cfg = ExperimentConfig {
        dataset,
        predicates,
        crowd,
        strategies,
        batch_size: raw.batch_size,
        votes_per_pair,
        annotation_proportions: raw.annotation_proportion.into_vec(),
        seed_fraction: raw.seed_fraction,
        num_runs,
        base_rng_seed: raw.base_rng_seed,
        hyperparams: Hyperparams {
            l2_lambda: classifier.l2_lambda,
            epochs: classifier.epochs,
            learning_rate: classifier.learning_rate,
            seed: 0,
        },
        vocabulary: VocabularyConfig {
            min_df: vocabulary.min_df,
            max_features: vocabulary.max_features,
        },
        exclusion_threshold: raw.exclusion_threshold,
        selection: raw.selection,
    };
    cfg.validate()?;
    Ok(cfg)
}
