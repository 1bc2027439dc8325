//! Generator for keyword-bearing synthetic screening pools.
//!
//! Each predicate owns two small cue vocabularies, one that signals IN and one
//! that signals OUT. A document mentions a few cues per predicate, mostly from
//! the set matching its gold label, embedded in Zipf-distributed background
//! words. A configurable share of (document, predicate) pairs is ambiguous:
//! their cues are drawn from both sets evenly, so no text classifier can
//! resolve them and only annotation helps.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, Label};
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

const BACKGROUND_WORDS: usize = 1500;
const CUES_PER_SET: usize = 25;
const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ne", "ru", "sa", "to", "vi", "be", "da", "fo", "gu", "ha", "ji", "pe", "qui", "ro", "su", "te", "ul", "wa", "xe",
    "yo", "zi",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub items: usize,
    pub selectivities: Vec<f64>,
    pub seed: u64,
    /// Share of (document, predicate) pairs whose cues carry no signal.
    pub ambiguity: f64,
    /// Probability that a cue in an unambiguous pair matches the gold label.
    pub cue_fidelity: f64,
}

impl SynthConfig {
    pub fn new(items: usize, selectivities: Vec<f64>, seed: u64) -> Self {
        SynthConfig {
            items,
            selectivities,
            seed,
            ambiguity: 0.3,
            cue_fidelity: 0.9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.items < 2 {
            return Err(Error::invalid("items", "need at least two items"));
        }
        if self.selectivities.is_empty() {
            return Err(Error::invalid("selectivities", "need at least one predicate"));
        }
        for &s in &self.selectivities {
            let n_in = (s * self.items as f64).round() as usize;
            if !(s > 0.0 && s < 1.0) || n_in == 0 || n_in == self.items {
                return Err(Error::invalid(
                    "selectivities",
                    format!("{s} leaves a predicate with a single class"),
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.ambiguity) {
            return Err(Error::invalid("ambiguity", "must lie in [0, 1]"));
        }
        if !(0.5..=1.0).contains(&self.cue_fidelity) {
            return Err(Error::invalid("cueFidelity", "must lie in [0.5, 1]"));
        }
        Ok(())
    }
}

fn make_words(rng: &mut ChaCha8Rng, count: usize, taken: &mut std::collections::HashSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let len = rng.random_range(2..=4);
        let word: String = (0..len).map(|_| SYLLABLES[rng.random_range(0..SYLLABLES.len())]).collect();
        if taken.insert(word.clone()) {
            out.push(word);
        }
    }
    out
}

/// Generates a corpus with predicates `p1..pn`. Exactly
/// `round(selectivity * items)` documents are IN for each predicate,
/// independently across predicates.
pub fn generate(config: &SynthConfig) -> Result<Corpus> {
    config.validate()?;
    // word lists depend only on the predicate count, not on the seed
    let mut lex_rng = rng::stream(0x5eed, Stream::Synthetic);
    let mut taken = std::collections::HashSet::new();
    let background = make_words(&mut lex_rng, BACKGROUND_WORDS, &mut taken);
    let cues: Vec<[Vec<String>; 2]> = config
        .selectivities
        .iter()
        .map(|_| {
            [
                make_words(&mut lex_rng, CUES_PER_SET, &mut taken),
                make_words(&mut lex_rng, CUES_PER_SET, &mut taken),
            ]
        })
        .collect();
    // Zipf(1) cumulative weights over background words
    let mut cumulative = Vec::with_capacity(BACKGROUND_WORDS);
    let mut acc = 0.0;
    for r in 0..BACKGROUND_WORDS {
        acc += 1.0 / (r + 1) as f64;
        cumulative.push(acc);
    }

    let mut rng = rng::stream(config.seed, Stream::Synthetic);
    let n = config.items;
    let mut gold = vec![Vec::with_capacity(config.selectivities.len()); n];
    for &s in &config.selectivities {
        let n_in = (s * n as f64).round() as usize;
        let mut column: Vec<bool> = (0..n).map(|i| i < n_in).collect();
        column.shuffle(&mut rng);
        for (g, is_in) in gold.iter_mut().zip(column) {
            g.push(Label::from_bool(is_in));
        }
    }

    let width = n.to_string().len();
    let mut documents = Vec::with_capacity(n);
    for (i, labels) in gold.into_iter().enumerate() {
        let mut words: Vec<&str> = Vec::new();
        let len = rng.random_range(30..=70);
        for _ in 0..len {
            let u = rng.random::<f64>() * acc;
            let r = cumulative.partition_point(|&c| c < u).min(BACKGROUND_WORDS - 1);
            words.push(&background[r]);
        }
        for (p, label) in labels.iter().enumerate() {
            let ambiguous = rng.random::<f64>() < config.ambiguity;
            let n_cues = rng.random_range(1..=3);
            for _ in 0..n_cues {
                let matches = if ambiguous {
                    rng.random::<bool>()
                } else {
                    rng.random::<f64>() < config.cue_fidelity
                };
                let set = if matches == label.is_in() { 0 } else { 1 };
                let list = &cues[p][set];
                words.push(&list[rng.random_range(0..list.len())]);
            }
        }
        words.shuffle(&mut rng);
        documents.push(Document::new(format!("doc{i:0width$}"), words.join(" "), labels));
    }

    let ids = (1..=config.selectivities.len()).map(|k| format!("p{k}")).collect();
    Corpus::new(documents, ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::GoldOracle;

    #[test]
    fn exact_selectivities() {
        let c = generate(&SynthConfig::new(1000, vec![0.61, 0.10], 3)).unwrap();
        assert_eq!(c.len(), 1000);
        assert!((c.selectivity(0) - 0.61).abs() < 1e-12);
        assert!((c.selectivity(1) - 0.10).abs() < 1e-12);
        assert_eq!(c.predicate_ids(), &["p1".to_string(), "p2".to_string()]);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&SynthConfig::new(200, vec![0.6, 0.2], 9)).unwrap();
        let b = generate(&SynthConfig::new(200, vec![0.6, 0.2], 9)).unwrap();
        let c = generate(&SynthConfig::new(200, vec![0.6, 0.2], 10)).unwrap();
        assert_eq!(a.documents(), b.documents());
        assert_ne!(a.documents(), c.documents());
    }

    #[test]
    fn ids_sort_in_item_order() {
        let c = generate(&SynthConfig::new(120, vec![0.5], 1)).unwrap();
        let ids: Vec<&str> = (0..c.len()).map(|i| c.item_id(i)).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        assert_eq!(c.gold_item(0), c.gold(0, 0));
    }

    #[test]
    fn rejects_degenerate_selectivity() {
        assert!(generate(&SynthConfig::new(10, vec![0.01], 0)).is_err());
        assert!(generate(&SynthConfig::new(10, vec![1.0], 0)).is_err());
    }
}
