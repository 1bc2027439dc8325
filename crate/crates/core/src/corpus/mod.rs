//! The finite pool of documents: ingestion, tokenization and TF-IDF features.

mod seed;
mod text;
mod tfidf;

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

pub use seed::split_seed;
pub use text::tokenize;
pub use tfidf::{build_vocabulary, vectorize, vectorize_text, SparseVector, Vocabulary, VocabularyConfig};

use crate::error::{Error, Result};
use crate::Pair;

/// Binary outcome of a predicate on a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    In,
    Out,
}

impl Label {
    pub fn from_bool(is_in: bool) -> Self {
        if is_in {
            Label::In
        } else {
            Label::Out
        }
    }

    pub fn is_in(self) -> bool {
        self == Label::In
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::In => Label::Out,
            Label::Out => Label::In,
        }
    }

    /// `1.0` for IN, `0.0` for OUT.
    pub fn as_prob(self) -> f64 {
        if self.is_in() {
            1.0
        } else {
            0.0
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "1" => Some(Label::In),
            "0" => Some(Label::Out),
            t if t.eq_ignore_ascii_case("in") => Some(Label::In),
            t if t.eq_ignore_ascii_case("out") => Some(Label::Out),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::In => "IN",
            Label::Out => "OUT",
        })
    }
}

/// One item of the pool. Gold labels are only reachable through
/// [`GoldOracle`], which the crowd simulator and the evaluator use.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub text: String,
    gold: Vec<Label>,
}

impl Document {
    /// `gold` is indexed by predicate position.
    pub fn new(id: impl Into<String>, text: impl Into<String>, gold: Vec<Label>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            gold,
        }
    }
}

/// Source of ground truth for `(item, predicate)` pairs.
pub trait GoldOracle {
    fn gold(&self, item: usize, predicate: usize) -> Label;

    /// Conjunction over all predicates.
    fn gold_item(&self, item: usize) -> Label;

    /// Human-readable `(item, predicate)` names for error messages.
    fn describe(&self, pair: Pair) -> (String, String) {
        (pair.item.to_string(), pair.predicate.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    documents: Vec<Document>,
    predicate_ids: Vec<String>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, predicate_ids: Vec<String>) -> Result<Self> {
        if predicate_ids.is_empty() {
            return Err(Error::Config("at least one predicate is required".into()));
        }
        let mut seen = HashSet::new();
        for p in &predicate_ids {
            if !seen.insert(p.as_str()) {
                return Err(Error::Config(format!("duplicate predicate id `{p}`")));
            }
        }
        let mut ids = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !ids.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
            if doc.gold.len() != predicate_ids.len() {
                return Err(Error::Config(format!(
                    "document `{}` has {} gold labels for {} predicates",
                    doc.id,
                    doc.gold.len(),
                    predicate_ids.len()
                )));
            }
        }
        Ok(Corpus { documents, predicate_ids })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn predicate_ids(&self) -> &[String] {
        &self.predicate_ids
    }

    pub fn num_predicates(&self) -> usize {
        self.predicate_ids.len()
    }

    pub fn predicate_index(&self, id: &str) -> Option<usize> {
        self.predicate_ids.iter().position(|p| p == id)
    }

    pub fn item_id(&self, item: usize) -> &str {
        &self.documents[item].id
    }

    /// Fraction of documents whose gold label for `predicate` is IN.
    pub fn selectivity(&self, predicate: usize) -> f64 {
        if self.documents.is_empty() {
            return 0.0;
        }
        let n_in = self.documents.iter().filter(|d| d.gold[predicate].is_in()).count();
        n_in as f64 / self.documents.len() as f64
    }

    /// Fraction of documents that satisfy every predicate.
    pub fn relevant_fraction(&self) -> f64 {
        if self.documents.is_empty() {
            return 0.0;
        }
        let n = (0..self.len()).filter(|&i| self.gold_item(i).is_in()).count();
        n as f64 / self.len() as f64
    }

    /// Writes the corpus in the CSV layout accepted by [`load_corpus`].
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["id".to_string(), "text".to_string()];
        header.extend(self.predicate_ids.iter().cloned());
        w.write_record(&header)?;
        for doc in &self.documents {
            let mut row = vec![doc.id.clone(), doc.text.clone()];
            row.extend(doc.gold.iter().map(|l| if l.is_in() { "1" } else { "0" }.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }
}

impl GoldOracle for Corpus {
    fn gold(&self, item: usize, predicate: usize) -> Label {
        self.documents[item].gold[predicate]
    }

    fn gold_item(&self, item: usize) -> Label {
        Label::from_bool(self.documents[item].gold.iter().all(|l| l.is_in()))
    }

    fn describe(&self, pair: Pair) -> (String, String) {
        (self.item_id(pair.item).to_string(), self.predicate_ids[pair.predicate].clone())
    }
}

/// Loads a screening dataset: UTF-8 CSV with a header naming `id`, `text`
/// and one 0/1 column per predicate id. Extra columns are ignored.
pub fn load_corpus(path: impl AsRef<Path>, predicate_ids: &[String]) -> Result<Corpus> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file, predicate_ids)
}

pub fn read_corpus<R: Read>(reader: R, predicate_ids: &[String]) -> Result<Corpus> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let id_col = column("id")?;
    let text_col = column("text")?;
    let label_cols = predicate_ids.iter().map(|p| column(p)).collect::<Result<Vec<_>>>()?;

    let mut documents = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        // header is line 1
        let row = record.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        let field = |c: usize| record.get(c).unwrap_or("");
        let gold = label_cols
            .iter()
            .zip(predicate_ids)
            .map(|(&c, p)| {
                Label::parse(field(c)).ok_or_else(|| Error::BadLabel {
                    row,
                    column: p.clone(),
                    value: field(c).to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        documents.push(Document::new(field(id_col), field(text_col), gold));
    }
    Corpus::new(documents, predicate_ids.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preds() -> Vec<String> {
        vec!["p1".into(), "p2".into()]
    }

    #[test]
    fn parses_two_rows() {
        let data = "id,text,p1,p2\na,hello world,1,0\nb,other text,0,1\n";
        let c = read_corpus(data.as_bytes(), &preds()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.gold(0, 0), Label::In);
        assert_eq!(c.gold(0, 1), Label::Out);
        assert_eq!(c.gold(1, 0), Label::Out);
        assert_eq!(c.gold(1, 1), Label::In);
        assert_eq!(c.item_id(1), "b");
    }

    #[test]
    fn missing_column_is_named() {
        let data = "id,text,p1\na,x,1\n";
        match read_corpus(data.as_bytes(), &preds()) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "p2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_label_reports_row() {
        let data = "id,text,p1,p2\na,x,1,0\nb,y,yes,0\n";
        match read_corpus(data.as_bytes(), &preds()) {
            Err(Error::BadLabel { row, column, value }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "p1");
                assert_eq!(value, "yes");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let data = "id,text,p1,p2\na,x,1,0\na,y,0,0\n";
        assert!(matches!(read_corpus(data.as_bytes(), &preds()), Err(Error::DuplicateId(id)) if id == "a"));
    }

    #[test]
    fn csv_roundtrip() {
        let data = "id,text,p1,p2\na,\"hello, world\",1,0\nb,other,0,1\n";
        let c = read_corpus(data.as_bytes(), &preds()).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), data);
    }

    #[test]
    fn gold_item_is_conjunction() {
        let data = "id,text,p1,p2\na,x,1,1\nb,y,1,0\n";
        let c = read_corpus(data.as_bytes(), &preds()).unwrap();
        assert_eq!(c.gold_item(0), Label::In);
        assert_eq!(c.gold_item(1), Label::Out);
        assert_eq!(c.relevant_fraction(), 0.5);
    }
}
