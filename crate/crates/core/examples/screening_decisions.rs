//! Combines crowd labels and classifier outputs into per-item screening
//! decisions and scores them against the gold standard.

use screenal::crowd::VoteRecord;
use screenal::screening::{compute_metrics, decide_all, write_decisions};
use screenal::{Corpus, Document, Label, LabelStore, LinearModel, ModelRegistry, Pair, SparseVector};

fn main() -> screenal::Result<()> {
    let gold = [[true, true], [true, false], [false, true], [true, true]];
    let docs = gold
        .iter()
        .enumerate()
        .map(|(i, g)| Document::new(format!("doc{i}"), "", g.iter().map(|&b| Label::from_bool(b)).collect()))
        .collect();
    let corpus = Corpus::new(docs, vec!["on_topic".into(), "peer_reviewed".into()])?;

    // one-feature models: the feature value drives P(IN)
    let mut models = ModelRegistry::new(corpus.predicate_ids().to_vec());
    models.insert(
        0,
        LinearModel {
            weights: vec![4.0],
            bias: -1.0,
            ..LinearModel::constant(1, 0.5)
        },
    );
    models.insert(1, LinearModel::constant(1, 0.8));
    let vectors: Vec<SparseVector> = [1.0, 0.6, -0.5, 0.9]
        .iter()
        .map(|&v| SparseVector::from_pairs(vec![(0, v)]))
        .collect();

    // the crowd has already said doc1 is not peer reviewed
    let mut labels = LabelStore::new();
    labels.insert(VoteRecord {
        pair: Pair::new(1, 1),
        votes: vec![Label::Out, Label::Out, Label::In],
        aggregated: Label::Out,
        votes_charged: 3,
    });

    let decisions = decide_all(&vectors, &labels, &models, 0.5)?;
    write_decisions(&decisions, &corpus, std::io::stdout().lock())?;
    let gold_items: Vec<Label> = (0..corpus.len())
        .map(|i| screenal::corpus::GoldOracle::gold_item(&corpus, i))
        .collect();
    println!("{:?}", compute_metrics(&decisions, &gold_items)?);
    Ok(())
}
