use std::collections::BTreeMap;

use screenal::crowd::AccuracyModel;
use screenal::harness::{
    run_grid_on, run_single, run_single_detailed, write_results_to, Cell, Dataset, ExperimentConfig, RowKind, SynthConfig,
};
use screenal::model::Hyperparams;
use screenal::StrategyKind;

fn config(items: usize, accuracy: f64, strategy: StrategyKind, votes: usize, proportion: f64) -> ExperimentConfig {
    ExperimentConfig::synthetic(
        SynthConfig::new(items, vec![0.6, 0.2], 7),
        AccuracyModel::Point(accuracy),
        strategy,
        votes,
        proportion,
    )
    .unwrap()
}

fn cell(cfg: &ExperimentConfig) -> Cell {
    cfg.cells()[0]
}

#[test]
fn identical_seed_gives_identical_run() {
    let cfg = config(400, 0.8, StrategyKind::ObjectiveAware, 3, 0.3);
    let data = Dataset::load(&cfg).unwrap();
    let a = run_single_detailed(&cfg, &data, cell(&cfg), 5).unwrap();
    let b = run_single_detailed(&cfg, &data, cell(&cfg), 5).unwrap();
    assert_eq!(a.record, b.record);
    assert_eq!(a.batches, b.batches);
    assert_eq!(a.state.labels, b.state.labels);
    let c = run_single_detailed(&cfg, &data, cell(&cfg), 6).unwrap();
    assert_ne!(a.batches, c.batches);
}

#[test]
fn budget_lands_within_one_batch_of_target() {
    let cfg = config(1000, 0.8, StrategyKind::Uncertainty, 3, 0.25);
    let data = Dataset::load(&cfg).unwrap();
    let r = run_single(&cfg, &data, cell(&cfg), 1).unwrap();
    let target = 1500u64;
    let batch = (cfg.batch_size * 3) as u64;
    assert!(r.budget_spent <= target);
    assert!(target - r.budget_spent < batch, "spent {}", r.budget_spent);
    assert_eq!(r.budget_spent, 3 * r.annotated_pairs as u64);
}

#[test]
fn random_picks_ignore_models_and_crowd() {
    let base = config(500, 0.8, StrategyKind::Random, 3, 0.3);
    let data = Dataset::load(&base).unwrap();
    let reference = run_single_detailed(&base, &data, cell(&base), 11).unwrap();

    let mut other_model = base.clone();
    other_model.hyperparams = Hyperparams {
        epochs: 3,
        learning_rate: 0.5,
        l2_lambda: 1e-2,
        ..base.hyperparams
    };
    let mut other_crowd = config(500, 0.6, StrategyKind::Random, 3, 0.3);
    other_crowd.hyperparams = base.hyperparams;

    for cfg in [other_model, other_crowd] {
        let o = run_single_detailed(&cfg, &data, cell(&cfg), 11).unwrap();
        assert_eq!(o.batches, reference.batches);
    }
}

#[test]
fn more_expert_labels_never_hurt() {
    for strategy in StrategyKind::ALL {
        let mut cfg = config(2000, 1.0, strategy, 1, 0.25);
        cfg.annotation_proportions = vec![0.25, 0.5];
        let data = Dataset::load(&cfg).unwrap();
        let mean = |prop: f64| {
            let c = Cell {
                strategy,
                votes_per_pair: 1,
                annotation_proportion: prop,
            };
            cfg.run_seeds()
                .map(|s| run_single(&cfg, &data, c, s).unwrap().metrics.f1_in)
                .sum::<f64>()
                / cfg.num_runs as f64
        };
        let (quarter, half) = (mean(0.25), mean(0.5));
        assert!(half >= quarter, "{strategy}: {half} < {quarter}");
    }
}

fn small_grid() -> (ExperimentConfig, Dataset) {
    let mut cfg = config(300, 0.8, StrategyKind::Random, 1, 0.2);
    cfg.strategies = StrategyKind::ALL.to_vec();
    cfg.votes_per_pair = vec![1, 3];
    cfg.annotation_proportions = vec![0.2, 0.4];
    cfg.num_runs = 10;
    cfg.batch_size = 40;
    let data = Dataset::load(&cfg).unwrap();
    (cfg, data)
}

fn csv_of(rows: &[screenal::harness::ResultRow]) -> String {
    let mut out = Vec::new();
    write_results_to(rows, &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn grid_emits_runs_and_summaries() {
    let (cfg, data) = small_grid();
    let rows = run_grid_on(&cfg, &data).unwrap();
    let count = |k: RowKind| rows.iter().filter(|r| r.kind == k).count();
    assert_eq!(count(RowKind::Run), 120);
    assert_eq!(count(RowKind::Mean), 12);
    assert_eq!(count(RowKind::Std), 12);

    let text = csv_of(&rows);
    assert_eq!(text, csv_of(&run_grid_on(&cfg, &data).unwrap()));

    // recompute each cell's mean from the serialized run rows
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut runs: BTreeMap<(String, String, String), Vec<f64>> = BTreeMap::new();
    let mut means = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let key = (rec[0].to_string(), rec[1].to_string(), rec[2].to_string());
        let f1: f64 = rec[4].parse().unwrap();
        match &rec[11] {
            "run" => runs.entry(key).or_default().push(f1),
            "mean" => {
                assert!(rec[3].is_empty());
                means.insert(key, f1);
            }
            _ => {}
        }
    }
    assert_eq!(runs.len(), 12);
    for (key, vals) in &runs {
        assert_eq!(vals.len(), 10);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        // the run values are themselves rounded to 6 decimals
        assert!((mean - means[key]).abs() <= 1e-6, "{key:?}: {mean} vs {}", means[key]);
    }
}

#[test]
fn single_cell_grid_matches_repeated_runs() {
    let mut cfg = config(300, 0.75, StrategyKind::ObjectiveAware, 3, 0.3);
    cfg.num_runs = 4;
    let data = Dataset::load(&cfg).unwrap();
    let rows = run_grid_on(&cfg, &data).unwrap();
    let grid: Vec<_> = rows.iter().filter(|r| r.kind == RowKind::Run).collect();
    let direct: Vec<_> = cfg.run_seeds().map(|s| run_single(&cfg, &data, cell(&cfg), s).unwrap()).collect();
    assert_eq!(grid.len(), direct.len());
    for (g, d) in grid.iter().zip(&direct) {
        assert_eq!(g.run_seed, Some(d.run_seed));
        assert_eq!(g.f1_in, d.metrics.f1_in);
        assert_eq!(g.budget_spent, d.budget_spent as f64);
    }
}

#[test]
fn bundled_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = screenal::harness::load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(!cfg.cells().is_empty());
    }
}
