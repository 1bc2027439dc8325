use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use screenal::harness::{self, Cell, Dataset, RunOutcome, SynthConfig};
use screenal::screening::write_decisions;

#[derive(Parser)]
#[command(name = "screenal", version, about = "Multi-predicate screening with active learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment (single cell or grid) and write the results CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write per-run vote logs, decisions and model dumps here.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
        /// Write the vocabulary as TSV (term, df, idf).
        #[arg(long)]
        vocab_out: Option<PathBuf>,
    },
    /// Generate a synthetic screening dataset as CSV.
    GenSynth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        items: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.6, 0.2])]
        selectivities: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        ambiguity: Option<f64>,
        #[arg(long)]
        cue_fidelity: Option<f64>,
    },
    /// Print the pool's pair scores after the seed annotation, best first.
    Score {
        #[arg(long)]
        config: PathBuf,
        /// Run seed; defaults to the config's baseRngSeed.
        #[arg(long)]
        seed: Option<u64>,
        /// Only print the first N pairs.
        #[arg(long)]
        top: Option<usize>,
    },
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn trace_run(dir: &Path, dataset: &Dataset, cell: Cell, outcome: &RunOutcome) -> screenal::Result<()> {
    let stem = format!(
        "{}_v{}_p{:.6}_s{}",
        cell.strategy, cell.votes_per_pair, cell.annotation_proportion, outcome.record.run_seed
    );
    let io = |path: PathBuf, e: io::Error| screenal::Error::Config(format!("{}: {e}", path.display()));
    let open = |name: String| {
        let path = dir.join(name);
        File::create(&path).map(BufWriter::new).map_err(|e| io(path, e))
    };
    outcome
        .state
        .labels
        .write_vote_log(&dataset.corpus, open(format!("votes_{stem}.csv"))?)?;
    write_decisions(&outcome.decisions, &dataset.corpus, open(format!("decisions_{stem}.csv"))?)?;
    for (p, id) in dataset.corpus.predicate_ids().iter().enumerate() {
        let name = format!("model_{stem}_{id}.txt");
        let mut w = open(name.clone())?;
        outcome
            .state
            .models
            .get(p)?
            .write_text(&mut w)
            .map_err(|e| io(dir.join(&name), e))?;
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            trace_dir,
            vocab_out,
        } => {
            let cfg = harness::load_config(&config)?;
            let dataset = Dataset::load(&cfg)?;
            if let Some(path) = vocab_out {
                dataset.vocabulary.write_tsv(create(&path)?)?;
            }
            let rows = match &trace_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    harness::run_grid_with(&cfg, &dataset, |cell, o| trace_run(dir, &dataset, cell, o))?
                }
                None => harness::run_grid_on(&cfg, &dataset)?,
            };
            harness::write_results(&rows, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::GenSynth {
            out,
            items,
            selectivities,
            seed,
            ambiguity,
            cue_fidelity,
        } => {
            let mut synth = SynthConfig::new(items, selectivities, seed);
            if let Some(a) = ambiguity {
                synth.ambiguity = a;
            }
            if let Some(f) = cue_fidelity {
                synth.cue_fidelity = f;
            }
            let corpus = harness::synth::generate(&synth)?;
            let mut w = create(&out)?;
            corpus.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Score { config, seed, top } => {
            let cfg = harness::load_config(&config)?;
            let dataset = Dataset::load(&cfg)?;
            let Some(cell) = cfg.cells().into_iter().next() else {
                bail!("config has no grid cells");
            };
            let (table, ranked) = harness::score_snapshot(&cfg, &dataset, cell, seed.unwrap_or(cfg.base_rng_seed))?;
            let stdout = io::stdout();
            let mut w = csv::Writer::from_writer(stdout.lock());
            w.write_record(["rank", "itemId", "predicateId", "probIn", "score"])?;
            for (rank, s) in ranked.iter().take(top.unwrap_or(usize::MAX)).enumerate() {
                w.write_record([
                    (rank + 1).to_string(),
                    table.item_id(s.pair.item).to_string(),
                    table.predicate_id(s.pair.predicate).to_string(),
                    format!("{:.6}", table.prob(s.pair)),
                    format!("{:.6}", s.score),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
