//! End-to-end active-learning runs, grid sweeps and result tables.

mod config;
mod grid;
mod run;
pub mod synth;

pub use config::{load_config, parse_config, Cell, DatasetSource, ExperimentConfig};
pub use grid::{run_grid, run_grid_on, run_grid_with, summarize, write_results, write_results_to, ResultRow, RowKind};
pub use run::{run_single, run_single_detailed, score_snapshot, train_models, Dataset, MetricsRecord, RunOutcome, RunState};
pub use synth::SynthConfig;
