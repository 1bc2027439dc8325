//! Compares objective-aware, uncertainty and random sampling on a synthetic
//! two-predicate pool (selectivities 0.6 / 0.2) annotated by a simulated crowd
//! of 0.9-accurate workers at 3 votes per pair, labeling half of all pairs.
//!
//! ```text
//! cargo run --release --example compare_strategies -- [items] [runs] [votes] [proportion] [ambiguity] [cue_fidelity] [accuracy]
//! ```

use std::time::Instant;

use screenal::harness::{run_grid_on, Dataset, ExperimentConfig, RowKind, SynthConfig};
use screenal::{AccuracyModel, StrategyKind};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let items: usize = arg(0, "2000").parse()?;
    let runs: usize = arg(1, "10").parse()?;
    let votes: usize = arg(2, "3").parse()?;
    let proportion: f64 = arg(3, "0.5").parse()?;
    let accuracy: f64 = arg(6, "0.9").parse()?;
    let mut synth = SynthConfig::new(items, vec![0.6, 0.2], 42);
    if let Some(a) = args.get(4) {
        synth.ambiguity = a.parse()?;
    }
    if let Some(f) = args.get(5) {
        synth.cue_fidelity = f.parse()?;
    }

    let mut config = ExperimentConfig::synthetic(
        synth,
        AccuracyModel::Point(accuracy),
        StrategyKind::ObjectiveAware,
        votes,
        proportion,
    )?;
    config.strategies = StrategyKind::ALL.to_vec();
    config.num_runs = runs;

    let start = Instant::now();
    let dataset = Dataset::load(&config)?;
    println!(
        "pool: {} items, {} terms, relevant fraction {:.3}",
        dataset.corpus.len(),
        dataset.vocabulary.len(),
        dataset.corpus.relevant_fraction()
    );
    let rows = run_grid_on(&config, &dataset)?;
    println!("{:<16} {:>8} {:>8} {:>8} {:>8}", "strategy", "f1_in", "std", "prec_in", "rec_in");
    for kind in StrategyKind::ALL {
        let mean = rows.iter().find(|r| r.strategy == kind && r.kind == RowKind::Mean).unwrap();
        let std = rows.iter().find(|r| r.strategy == kind && r.kind == RowKind::Std).unwrap();
        println!(
            "{:<16} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            kind.as_str(),
            mean.f1_in,
            std.f1_in,
            mean.precision_in,
            mean.recall_in
        );
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
