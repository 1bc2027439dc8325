//! Conjunctive combination of per-predicate evidence and evaluation metrics.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use crate::corpus::{Corpus, Label, SparseVector};
use crate::crowd::LabelStore;
use crate::error::{Error, Result};
use crate::model::ModelRegistry;
use crate::strategies::estimate_in_probability;
use crate::Pair;

/// The inclusion criteria. An item is relevant only if all of them hold.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateSet {
    predicates: Vec<(String, String)>,
}

impl PredicateSet {
    /// `(id, description)` pairs.
    pub fn new(predicates: Vec<(String, String)>) -> Result<Self> {
        if predicates.is_empty() {
            return Err(Error::Config("predicate set is empty".into()));
        }
        let mut seen = HashSet::new();
        for (id, _) in &predicates {
            if !seen.insert(id.as_str()) {
                return Err(Error::Config(format!("duplicate predicate id `{id}`")));
            }
        }
        Ok(PredicateSet { predicates })
    }

    pub fn ids(&self) -> Vec<String> {
        self.predicates.iter().map(|(id, _)| id.clone()).collect()
    }

    pub fn description(&self, index: usize) -> &str {
        &self.predicates[index].1
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Crowd,
    Machine,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Crowd => "crowd",
            Provenance::Machine => "machine",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningDecision {
    pub item: usize,
    pub per_predicate_prob_in: Vec<f64>,
    pub prob_out: f64,
    pub decision: Label,
    pub provenance: Vec<Provenance>,
}

/// `1 - Π p` over the per-predicate IN probabilities.
pub fn exclusion_probability(in_probs: &[f64]) -> Result<f64> {
    let mut product = 1.0;
    for &p in in_probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        product *= p;
    }
    Ok(1.0 - product)
}

/// OUT iff `prob_out >= threshold`.
pub fn decide(prob_out: f64, threshold: f64) -> Label {
    Label::from_bool(prob_out < threshold)
}

pub fn decide_item(
    item: usize,
    x: &SparseVector,
    labels: &LabelStore,
    models: &ModelRegistry,
    threshold: f64,
) -> Result<ScreeningDecision> {
    let n = models.num_predicates();
    let mut probs = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for p in 0..n {
        let pair = Pair::new(item, p);
        probs.push(estimate_in_probability(pair, x, labels, models)?);
        provenance.push(if labels.contains(pair) {
            Provenance::Crowd
        } else {
            Provenance::Machine
        });
    }
    let prob_out = exclusion_probability(&probs)?;
    Ok(ScreeningDecision {
        item,
        per_predicate_prob_in: probs,
        prob_out,
        decision: decide(prob_out, threshold),
        provenance,
    })
}

/// Decisions for every item of the pool, in item order.
pub fn decide_all(vectors: &[SparseVector], labels: &LabelStore, models: &ModelRegistry, threshold: f64) -> Result<Vec<ScreeningDecision>> {
    vectors
        .iter()
        .enumerate()
        .map(|(i, x)| decide_item(i, x, labels, models, threshold))
        .collect()
}

/// Decision CSV: item id, one probability column per predicate, `probOut`,
/// `decision`, then one provenance column per predicate.
pub fn write_decisions<W: Write>(decisions: &[ScreeningDecision], corpus: &Corpus, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let preds = corpus.predicate_ids();
    let mut header = vec!["itemId".to_string()];
    header.extend(preds.iter().map(|p| format!("prob_{p}")));
    header.extend(["probOut".to_string(), "decision".to_string()]);
    header.extend(preds.iter().map(|p| format!("source_{p}")));
    w.write_record(&header)?;
    for d in decisions {
        let mut row = vec![corpus.item_id(d.item).to_string()];
        row.extend(d.per_predicate_prob_in.iter().map(|p| format!("{p:.6}")));
        row.push(format!("{:.6}", d.prob_out));
        row.push(d.decision.to_string());
        row.extend(d.provenance.iter().map(|p| p.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Confusion counts for one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Precision, recall and F1 for both classes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassMetrics {
    pub precision_in: f64,
    pub recall_in: f64,
    pub f1_in: f64,
    pub precision_out: f64,
    pub recall_out: f64,
    pub f1_out: f64,
}

/// Scores decisions against per-item gold relevance (`gold[i]` is the
/// conjunction of item `i`'s predicate labels). Every item must be decided
/// exactly once.
pub fn compute_metrics(decisions: &[ScreeningDecision], gold: &[Label]) -> Result<ClassMetrics> {
    let mut predicted: Vec<Option<Label>> = vec![None; gold.len()];
    for d in decisions {
        match predicted.get_mut(d.item) {
            Some(slot @ None) => *slot = Some(d.decision),
            Some(Some(_)) => return Err(Error::Config(format!("item {} decided twice", d.item))),
            None => return Err(Error::Config(format!("decision for unknown item {}", d.item))),
        }
    }
    let mut c_in = Confusion::default();
    let mut c_out = Confusion::default();
    for (i, (pred, &truth)) in predicted.iter().zip(gold).enumerate() {
        let pred = pred.ok_or_else(|| Error::MissingDecision(i.to_string()))?;
        match (pred, truth) {
            (Label::In, Label::In) => c_in.tp += 1,
            (Label::In, Label::Out) => {
                c_in.fp += 1;
                c_out.fn_ += 1;
            }
            (Label::Out, Label::In) => {
                c_in.fn_ += 1;
                c_out.fp += 1;
            }
            (Label::Out, Label::Out) => c_out.tp += 1,
        }
    }
    Ok(ClassMetrics {
        precision_in: c_in.precision(),
        recall_in: c_in.recall(),
        f1_in: c_in.f1(),
        precision_out: c_out.precision(),
        recall_out: c_out.recall(),
        f1_out: c_out.f1(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crowd::VoteRecord;
    use crate::model::LinearModel;

    fn decision(item: usize, decision: Label) -> ScreeningDecision {
        ScreeningDecision {
            item,
            per_predicate_prob_in: vec![],
            prob_out: if decision.is_in() { 0.0 } else { 1.0 },
            decision,
            provenance: vec![],
        }
    }

    fn record(pair: Pair, l: Label) -> VoteRecord {
        VoteRecord {
            pair,
            votes: vec![l],
            aggregated: l,
            votes_charged: 1,
        }
    }

    fn registry(probs: [f64; 2]) -> ModelRegistry {
        let mut m = ModelRegistry::new(vec!["p1".into(), "p2".into()]);
        m.insert(0, LinearModel::constant(1, probs[0]));
        m.insert(1, LinearModel::constant(1, probs[1]));
        m
    }

    #[test]
    fn exclusion_values() {
        assert!((exclusion_probability(&[0.51, 0.99]).unwrap() - 0.4951).abs() < 1e-12);
        assert_eq!(exclusion_probability(&[0.3, 0.0, 0.9]).unwrap(), 1.0);
        assert_eq!(exclusion_probability(&[1.0, 1.0]).unwrap(), 0.0);
        assert!(exclusion_probability(&[1.01]).is_err());
    }

    #[test]
    fn threshold_boundary_is_out() {
        assert_eq!(decide(0.5, 0.5), Label::Out);
        assert_eq!(decide(0.499_999, 0.5), Label::In);
    }

    #[test]
    fn crowd_labels_decide() {
        let x = SparseVector::default();
        let models = registry([0.1, 0.1]);
        let mut labels = LabelStore::new();
        labels.insert(record(Pair::new(0, 0), Label::In));
        labels.insert(record(Pair::new(0, 1), Label::In));
        let d = decide_item(0, &x, &labels, &models, 0.5).unwrap();
        assert_eq!(d.prob_out, 0.0);
        assert_eq!(d.decision, Label::In);
        assert_eq!(d.provenance, vec![Provenance::Crowd, Provenance::Crowd]);

        let models = registry([0.99, 0.99]);
        labels.insert(record(Pair::new(1, 1), Label::Out));
        let d = decide_item(1, &x, &labels, &models, 0.5).unwrap();
        assert_eq!(d.prob_out, 1.0);
        assert_eq!(d.decision, Label::Out);
        assert_eq!(d.provenance, vec![Provenance::Machine, Provenance::Crowd]);
    }

    #[test]
    fn machine_only_item() {
        let d = decide_item(0, &SparseVector::default(), &LabelStore::new(), &registry([0.9, 0.9]), 0.5).unwrap();
        assert!((d.prob_out - 0.19).abs() < 1e-9);
        assert_eq!(d.decision, Label::In);
    }

    #[test]
    fn missing_model_error() {
        let mut m = ModelRegistry::new(vec!["p1".into(), "p2".into()]);
        m.insert(0, LinearModel::constant(1, 0.5));
        assert!(matches!(
            decide_item(0, &SparseVector::default(), &LabelStore::new(), &m, 0.5),
            Err(Error::MissingModel(_))
        ));
    }

    #[test]
    fn metrics_confusion_arithmetic() {
        use Label::*;
        // TP=2, FP=1, FN=1, TN=1 for class IN
        let decisions = vec![
            decision(0, In),
            decision(1, In),
            decision(2, In),
            decision(3, Out),
            decision(4, Out),
        ];
        let gold = vec![In, In, Out, In, Out];
        let m = compute_metrics(&decisions, &gold).unwrap();
        assert!((m.precision_in - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.recall_in - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f1_in - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.precision_out - 0.5).abs() < 1e-12);
        assert!((m.recall_out - 0.5).abs() < 1e-12);
    }

    #[test]
    fn metrics_perfect_and_degenerate() {
        use Label::*;
        let gold = vec![In, Out, Out];
        let perfect: Vec<_> = gold.iter().enumerate().map(|(i, &l)| decision(i, l)).collect();
        let m = compute_metrics(&perfect, &gold).unwrap();
        assert_eq!((m.precision_in, m.recall_in, m.f1_in), (1.0, 1.0, 1.0));
        assert_eq!((m.precision_out, m.recall_out, m.f1_out), (1.0, 1.0, 1.0));

        let all_out = vec![decision(0, Out), decision(1, Out)];
        let m = compute_metrics(&all_out, &[Out, Out]).unwrap();
        assert_eq!(m.f1_in, 0.0);
        assert_eq!((m.precision_out, m.recall_out), (1.0, 1.0));
    }

    #[test]
    fn metrics_require_full_coverage() {
        use Label::*;
        assert!(matches!(compute_metrics(&[decision(0, In)], &[In, Out]), Err(Error::MissingDecision(i)) if i == "1"));
        assert!(compute_metrics(&[decision(0, In), decision(0, In)], &[In]).is_err());
    }

    #[test]
    fn predicate_set_validation() {
        assert!(PredicateSet::new(vec![]).is_err());
        assert!(PredicateSet::new(vec![("a".into(), "x".into()), ("a".into(), "y".into())]).is_err());
        let ps = PredicateSet::new(vec![("books".into(), "is about a book".into())]).unwrap();
        assert_eq!(ps.ids(), vec!["books".to_string()]);
        assert_eq!(ps.description(0), "is about a book");
    }
}
