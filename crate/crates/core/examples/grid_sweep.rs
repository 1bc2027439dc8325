//! Loads an experiment config, sweeps its grid and writes the results CSV.
//!
//! ```text
//! cargo run --release --example grid_sweep -- crates/core/configs/synthetic_grid.toml results.csv
//! ```

use screenal::harness::{load_config, run_grid, write_results, RowKind};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let config_path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/synthetic_grid.toml").into());
    let out = args.next().unwrap_or_else(|| "results.csv".into());

    let config = load_config(&config_path)?;
    let rows = run_grid(&config)?;
    write_results(&rows, &out)?;
    for r in rows.iter().filter(|r| r.kind == RowKind::Mean) {
        println!(
            "{:<16} votes={} prop={:.2} f1_in={:.3}",
            r.strategy.as_str(),
            r.votes_per_pair,
            r.proportion,
            r.f1_in
        );
    }
    println!("wrote {} rows to {out}", rows.len());
    Ok(())
}
