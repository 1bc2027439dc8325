use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::config::Cell;
use super::config::ExperimentConfig;
use super::run::{run_single_detailed, Dataset, MetricsRecord, RunOutcome};
use crate::error::{Error, Result};
use crate::strategies::StrategyKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowKind {
    Run,
    Mean,
    Std,
}

impl RowKind {
    fn as_str(self) -> &'static str {
        match self {
            RowKind::Run => "run",
            RowKind::Mean => "mean",
            RowKind::Std => "std",
        }
    }
}

/// One line of the results table. Summary rows carry no run seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub strategy: StrategyKind,
    pub votes_per_pair: usize,
    pub proportion: f64,
    pub run_seed: Option<u64>,
    pub f1_in: f64,
    pub precision_in: f64,
    pub recall_in: f64,
    pub f1_out: f64,
    pub precision_out: f64,
    pub recall_out: f64,
    pub budget_spent: f64,
    pub kind: RowKind,
}

impl ResultRow {
    pub fn from_record(r: &MetricsRecord) -> Self {
        ResultRow {
            strategy: r.strategy,
            votes_per_pair: r.votes_per_pair,
            proportion: r.annotation_proportion,
            run_seed: Some(r.run_seed),
            f1_in: r.metrics.f1_in,
            precision_in: r.metrics.precision_in,
            recall_in: r.metrics.recall_in,
            f1_out: r.metrics.f1_out,
            precision_out: r.metrics.precision_out,
            recall_out: r.metrics.recall_out,
            budget_spent: r.budget_spent as f64,
            kind: RowKind::Run,
        }
    }

    fn values(&self) -> [f64; 7] {
        [
            self.f1_in,
            self.precision_in,
            self.recall_in,
            self.f1_out,
            self.precision_out,
            self.recall_out,
            self.budget_spent,
        ]
    }

    fn with_values(&self, v: [f64; 7], kind: RowKind) -> Self {
        ResultRow {
            run_seed: None,
            f1_in: v[0],
            precision_in: v[1],
            recall_in: v[2],
            f1_out: v[3],
            precision_out: v[4],
            recall_out: v[5],
            budget_spent: v[6],
            kind,
            ..self.clone()
        }
    }

    fn sort_key(&self) -> (&'static str, usize, u64, (bool, u64), RowKind) {
        (
            self.strategy.as_str(),
            self.votes_per_pair,
            self.proportion.to_bits(),
            (self.run_seed.is_none(), self.run_seed.unwrap_or(0)),
            self.kind,
        )
    }
}

/// Mean and sample standard deviation (`n - 1`; zero for one run) of a
/// cell's run rows.
pub fn summarize(runs: &[ResultRow]) -> Option<(ResultRow, ResultRow)> {
    let first = runs.first()?;
    let n = runs.len() as f64;
    let mut mean = [0.0; 7];
    for r in runs {
        for (m, v) in mean.iter_mut().zip(r.values()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut std = [0.0; 7];
    if runs.len() > 1 {
        for r in runs {
            for ((s, v), m) in std.iter_mut().zip(r.values()).zip(mean) {
                *s += (v - m) * (v - m);
            }
        }
        std.iter_mut().for_each(|s| *s = (*s / (n - 1.0)).sqrt());
    }
    Some((first.with_values(mean, RowKind::Mean), first.with_values(std, RowKind::Std)))
}

/// Loads the dataset and runs every grid cell `numRuns` times.
pub fn run_grid(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let dataset = Dataset::load(config)?;
    run_grid_on(config, &dataset)
}

/// Runs are independent and execute in parallel; the merged table is in
/// sorted order regardless of scheduling.
pub fn run_grid_on(config: &ExperimentConfig, dataset: &Dataset) -> Result<Vec<ResultRow>> {
    run_grid_with(config, dataset, |_, _| Ok(()))
}

/// [`run_grid_on`], calling `inspect` with every finished run (possibly from
/// several threads at once).
pub fn run_grid_with<F>(config: &ExperimentConfig, dataset: &Dataset, inspect: F) -> Result<Vec<ResultRow>>
where
    F: Fn(Cell, &RunOutcome) -> Result<()> + Sync,
{
    let cells = config.cells();
    let seeds: Vec<u64> = config.run_seeds().collect();
    let jobs: Vec<_> = cells.iter().flat_map(|&c| seeds.iter().map(move |&s| (c, s))).collect();
    let records = jobs
        .par_iter()
        .map(|&(cell, seed)| {
            run_single_detailed(config, dataset, cell, seed)
                .and_then(|outcome| {
                    inspect(cell, &outcome)?;
                    Ok(outcome.record)
                })
                .map_err(|e| Error::Cell {
                    cell: format!("{cell} runSeed={seed}"),
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(records.len() + 2 * cells.len());
    for chunk in records.chunks(seeds.len()) {
        let runs: Vec<ResultRow> = chunk.iter().map(ResultRow::from_record).collect();
        let (mean, std) = summarize(&runs).expect("numRuns >= 1");
        rows.extend(runs);
        rows.push(mean);
        rows.push(std);
    }
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(rows)
}

pub const RESULTS_HEADER: [&str; 12] = [
    "strategy",
    "votes_per_pair",
    "proportion",
    "run_seed",
    "f1_in",
    "precision_in",
    "recall_in",
    "f1_out",
    "precision_out",
    "recall_out",
    "budget_spent",
    "row_kind",
];

/// Results CSV, rows sorted by `(strategy, votes_per_pair, proportion,
/// run_seed)` with each cell's summary rows after its runs.
pub fn write_results_to<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("no result rows to write".into()));
    }
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RESULTS_HEADER)?;
    for r in sorted {
        let mut rec = vec![
            r.strategy.to_string(),
            r.votes_per_pair.to_string(),
            format!("{:.6}", r.proportion),
            r.run_seed.map(|s| s.to_string()).unwrap_or_default(),
        ];
        rec.extend(r.values().iter().map(|v| format!("{v:.6}")));
        rec.push(r.kind.as_str().to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_results(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_results_to(rows, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(seed: u64, f1: f64) -> ResultRow {
        ResultRow {
            strategy: StrategyKind::Uncertainty,
            votes_per_pair: 3,
            proportion: 0.5,
            run_seed: Some(seed),
            f1_in: f1,
            precision_in: f1,
            recall_in: f1,
            f1_out: 1.0,
            precision_out: 1.0,
            recall_out: 1.0,
            budget_spent: 300.0,
            kind: RowKind::Run,
        }
    }

    #[test]
    fn single_row_file() {
        let mut buf = Vec::new();
        write_results_to(&[row(4, 0.5)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "strategy,votes_per_pair,proportion,run_seed,f1_in,precision_in,recall_in,f1_out,precision_out,recall_out,budget_spent,row_kind\n\
             uncertainty,3,0.500000,4,0.500000,0.500000,0.500000,1.000000,1.000000,1.000000,300.000000,run\n"
        );
    }

    #[test]
    fn empty_rows_rejected() {
        assert!(write_results_to(&[], Vec::new()).is_err());
    }

    #[test]
    fn summary_statistics() {
        let runs = vec![row(0, 0.2), row(1, 0.4), row(2, 0.9)];
        let (mean, std) = summarize(&runs).unwrap();
        assert!((mean.f1_in - 0.5).abs() < 1e-12);
        // sample variance: (0.09 + 0.01 + 0.16) / 2
        assert!((std.f1_in - 0.13f64.sqrt()).abs() < 1e-12);
        assert_eq!(std.budget_spent, 0.0);
        assert_eq!(mean.kind, RowKind::Mean);
        assert_eq!(mean.run_seed, None);
        let (_, std1) = summarize(&runs[..1]).unwrap();
        assert_eq!(std1.f1_in, 0.0);
    }

    #[test]
    fn rows_sorted_with_summaries_last() {
        let runs = vec![row(2, 0.1), row(0, 0.2)];
        let (mean, std) = summarize(&runs).unwrap();
        let mut other = row(1, 0.3);
        other.strategy = StrategyKind::ObjectiveAware;
        let mut buf = Vec::new();
        write_results_to(&[std, runs[0].clone(), mean, other, runs[1].clone()], &mut buf).unwrap();
        let kinds: Vec<String> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{}:{}:{}", f[0], f[3], f[11])
            })
            .collect();
        assert_eq!(
            kinds,
            vec![
                "objective-aware:1:run",
                "uncertainty:0:run",
                "uncertainty:2:run",
                "uncertainty::mean",
                "uncertainty::std"
            ]
        );
    }
}
