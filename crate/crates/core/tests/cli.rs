use std::path::Path;
use std::process::{Command, Output};

fn screenal(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_screenal"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

const CONFIG: &str = r#"
datasetPath = "synth.csv"
strategy = "objective-aware"
votesPerPair = 3
annotationProportion = 0.3
numRuns = 2
batchSize = 20

[[predicates]]
id = "p1"
accuracy = 0.9

[[predicates]]
id = "p2"
accuracy = 0.8
"#;

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = screenal(
        &[
            "gen-synth",
            "--out",
            "synth.csv",
            "--items",
            "300",
            "--selectivities",
            "0.5,0.3",
            "--seed",
            "4",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(dir.path().join("exp.toml"), CONFIG).unwrap();
    dir
}

#[test]
fn gen_synth_writes_requested_shape() {
    let dir = workspace();
    let corpus = screenal::corpus::load_corpus(dir.path().join("synth.csv"), &["p1".into(), "p2".into()]).unwrap();
    assert_eq!(corpus.len(), 300);
    assert_eq!(corpus.selectivity(0), 0.5);
    assert_eq!(corpus.selectivity(1), 0.3);
}

#[test]
fn run_writes_results_and_traces() {
    let dir = workspace();
    let out = screenal(
        &[
            "run",
            "--config",
            "exp.toml",
            "--out",
            "res.csv",
            "--trace-dir",
            "trace",
            "--vocab-out",
            "vocab.tsv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let results = std::fs::read_to_string(dir.path().join("res.csv")).unwrap();
    let mut lines = results.lines();
    assert_eq!(
        lines.next().unwrap(),
        "strategy,votes_per_pair,proportion,run_seed,f1_in,precision_in,recall_in,f1_out,precision_out,recall_out,budget_spent,row_kind"
    );
    assert_eq!(lines.count(), 4);
    let traces = std::fs::read_dir(dir.path().join("trace")).unwrap().count();
    // per run: vote log, decisions, one model per predicate
    assert_eq!(traces, 2 * 4);
    let vocab = std::fs::read_to_string(dir.path().join("vocab.tsv")).unwrap();
    assert!(vocab.starts_with("term\tdf\tidf\n"));
}

#[test]
fn score_ranks_pairs() {
    let dir = workspace();
    let out = screenal(&["score", "--config", "exp.toml", "--top", "5"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "rank,itemId,predicateId,probIn,score");
    assert_eq!(rows.len(), 6);
    let scores: Vec<f64> = rows[1..].iter().map(|r| r.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn bad_config_fails_with_key_name() {
    let dir = workspace();
    std::fs::write(dir.path().join("bad.toml"), CONFIG.replace("votesPerPair", "votes_per_item")).unwrap();
    let out = screenal(&["run", "--config", "bad.toml", "--out", "res.csv"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("votes_per_item"));
    assert!(!dir.path().join("res.csv").exists());

    std::fs::write(dir.path().join("zero.toml"), CONFIG.replace("votesPerPair = 3", "votesPerPair = 0")).unwrap();
    let out = screenal(&["run", "--config", "zero.toml", "--out", "res.csv"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("votesPerPair"));
}
