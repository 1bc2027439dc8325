use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;

use super::{tokenize, Corpus, Document};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabularyConfig {
    pub min_df: usize,
    pub max_features: usize,
}

impl Default for VocabularyConfig {
    fn default() -> Self {
        VocabularyConfig {
            min_df: 2,
            max_features: 50_000,
        }
    }
}

/// Term index with smoothed inverse document frequencies
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`.
///
/// Column indices follow lexicographic term order.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    term_to_index: HashMap<String, usize>,
    terms: Vec<String>,
    document_frequency: Vec<usize>,
    idf: Vec<f64>,
    corpus_size: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn df(&self, term: &str) -> Option<usize> {
        self.index(term).map(|i| self.document_frequency[i])
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.index(term).map(|i| self.idf[i])
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    /// TSV dump: `term`, `df`, `idf`, one term per line in index order.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "term\tdf\tidf")?;
        for i in 0..self.terms.len() {
            writeln!(w, "{}\t{}\t{:.6}", self.terms[i], self.document_frequency[i], self.idf[i])?;
        }
        Ok(())
    }
}

pub fn build_vocabulary(corpus: &Corpus, config: VocabularyConfig) -> Result<Vocabulary> {
    build_from_texts(corpus.documents().iter().map(|d| d.text.as_str()), config)
}

pub(crate) fn build_from_texts<'a>(texts: impl IntoIterator<Item = &'a str>, config: VocabularyConfig) -> Result<Vocabulary> {
    if config.min_df < 1 {
        return Err(Error::invalid("minDf", "must be at least 1"));
    }
    if config.max_features < 1 {
        return Err(Error::invalid("maxFeatures", "must be at least 1"));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    let mut n = 0usize;
    for text in texts {
        n += 1;
        let unique: HashSet<String> = tokenize(text).into_iter().collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }

    let mut kept: Vec<(String, usize)> = df.into_iter().filter(|(_, c)| *c >= config.min_df).collect();
    if kept.len() > config.max_features {
        // highest df first, ties lexicographic
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        kept.truncate(config.max_features);
        kept.sort_by(|a, b| a.0.cmp(&b.0));
    }
    if kept.is_empty() {
        return Err(Error::Config(format!(
            "vocabulary is empty with minDf={} over {n} documents",
            config.min_df
        )));
    }

    let mut term_to_index = HashMap::with_capacity(kept.len());
    let mut terms = Vec::with_capacity(kept.len());
    let mut document_frequency = Vec::with_capacity(kept.len());
    let mut idf = Vec::with_capacity(kept.len());
    for (i, (term, count)) in kept.into_iter().enumerate() {
        term_to_index.insert(term.clone(), i);
        idf.push(((1.0 + n as f64) / (1.0 + count as f64)).ln() + 1.0);
        terms.push(term);
        document_frequency.push(count);
    }
    Ok(Vocabulary {
        term_to_index,
        terms,
        document_frequency,
        idf,
        corpus_size: n,
    })
}

/// Sparse row with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds from arbitrary `(index, weight)` pairs; duplicate indices are
    /// summed.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, w) in pairs {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += w,
                _ => entries.push((i, w)),
            }
        }
        SparseVector { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&(_, w)| w == 0.0)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    /// Largest index + 1, or 0 for an empty vector.
    pub fn min_dimension(&self) -> usize {
        self.entries.last().map(|&(i, _)| i + 1).unwrap_or(0)
    }
}

/// Raw term counts times idf, L2-normalized. Out-of-vocabulary tokens are
/// ignored.
pub fn vectorize(doc: &Document, vocab: &Vocabulary) -> SparseVector {
    vectorize_text(&doc.text, vocab)
}

pub fn vectorize_text(text: &str, vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for tok in tokenize(text) {
        if let Some(i) = vocab.index(&tok) {
            *counts.entry(i).or_default() += 1.0;
        }
    }
    let mut entries: Vec<(usize, f64)> = counts.into_iter().map(|(i, tf)| (i, tf * vocab.idf[i])).collect();
    let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
    if norm > 0.0 {
        for e in &mut entries {
            e.1 /= norm;
        }
    }
    SparseVector { entries }
}
