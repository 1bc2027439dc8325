//! Runs one active-learning loop end to end and prints what happened in
//! each annotation batch.

use screenal::harness::{run_single_detailed, Dataset, ExperimentConfig, SynthConfig};
use screenal::{AccuracyModel, StrategyKind};

fn main() -> screenal::Result<()> {
    let config = ExperimentConfig::synthetic(
        SynthConfig::new(1000, vec![0.6, 0.2], 3),
        AccuracyModel::Point(0.9),
        StrategyKind::ObjectiveAware,
        3,
        0.3,
    )?;
    let data = Dataset::load(&config)?;
    let outcome = run_single_detailed(&config, &data, config.cells()[0], config.base_rng_seed)?;

    for (i, batch) in outcome.batches.iter().enumerate() {
        let per_pred: Vec<usize> = (0..data.corpus.num_predicates())
            .map(|p| batch.iter().filter(|pair| pair.predicate == p).count())
            .collect();
        println!("batch {i:2}: {:3} pairs, per predicate {per_pred:?}", batch.len());
    }
    let r = &outcome.record;
    println!(
        "{} pairs, {} votes of {}; f1_in={:.3} precision_in={:.3} recall_in={:.3}",
        r.annotated_pairs,
        r.budget_spent,
        outcome.state.ledger.total(),
        r.metrics.f1_in,
        r.metrics.precision_in,
        r.metrics.recall_in
    );
    Ok(())
}
