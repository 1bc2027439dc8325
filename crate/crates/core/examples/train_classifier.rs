//! Trains one predicate's classifier on a synthetic corpus and reports
//! held-out accuracy, then round-trips the model through its text dump.

use screenal::corpus::{GoldOracle, Label};
use screenal::harness::{synth, Dataset, SynthConfig};
use screenal::model::{train, Hyperparams, LinearModel, TrainingSet};
use screenal::VocabularyConfig;

fn main() -> screenal::Result<()> {
    let corpus = synth::generate(&SynthConfig::new(1000, vec![0.3], 1))?;
    let data = Dataset::from_corpus(corpus, VocabularyConfig::default())?;
    let split = 700;

    let examples = (0..split).map(|i| (data.vectors[i].clone(), data.corpus.gold(i, 0))).collect();
    let set = TrainingSet::new(examples)?;
    println!("class weights (IN, OUT): {:?}", set.class_weights());
    let model = train(&set, data.vocabulary.len(), Hyperparams::default())?;

    let correct = (split..data.corpus.len())
        .filter(|&i| {
            let p = model.predict_proba(&data.vectors[i]).unwrap();
            Label::from_bool(p >= 0.5) == data.corpus.gold(i, 0)
        })
        .count();
    println!("held-out accuracy: {:.3}", correct as f64 / (data.corpus.len() - split) as f64);

    let mut dump = Vec::new();
    model.write_text(&mut dump).expect("in-memory write");
    let restored = LinearModel::read_text(dump.as_slice())?;
    assert_eq!(restored.predict_proba(&data.vectors[0])?, model.predict_proba(&data.vectors[0])?);
    println!("model dump: {} bytes", dump.len());
    Ok(())
}
