use std::fs;
use std::path::Path;
use std::time::Instant;

use nichepop::error::Error;
use nichepop::harness::cli::report;
use nichepop::harness::output::read_trials_csv;
use nichepop::harness::{run_experiment, ExperimentConfig, ExperimentReport};
use nichepop::population::EngineConfig;

fn small(dir: &Path) -> ExperimentConfig {
    ExperimentConfig {
        n_trials: 4,
        engine: EngineConfig {
            iterations: 60,
            ..EngineConfig::default()
        },
        output_dir: dir.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[test]
fn single_trial_single_condition() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.n_trials = 1;
    cfg.sweep = Some(vec![0.3]);
    cfg.baselines.clear();
    run_experiment(&cfg).unwrap();
    let rows = read_trials_csv(&dir.path().join("trials.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].seed, 42);
    assert!(!dir.path().join("lambda_0.3/iterations.csv").exists());
    assert_eq!(
        fs::read_to_string(dir.path().join("sweep.csv"))
            .unwrap()
            .lines()
            .count(),
        2
    );
}

#[test]
fn default_config_layout_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        output_dir: dir.path().to_path_buf(),
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let rep = run_experiment(&cfg).unwrap();
    assert!(start.elapsed().as_secs_f64() < 60.0);

    let mut subdirs: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    subdirs.sort();
    assert_eq!(
        subdirs,
        [
            "homogeneous",
            "lambda_0",
            "lambda_0.1",
            "lambda_0.2",
            "lambda_0.3",
            "lambda_0.4",
            "lambda_0.5",
            "random"
        ]
    );
    assert_eq!(rep.sweep.len(), 6);
    let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().next(), Some("lambda,mean_si,std_si"));
    assert_eq!(sweep.lines().count(), 7);
    for c in &rep.conditions {
        assert_eq!(c.n_trials, 30);
        assert_eq!(c.seeds, (42..72).collect::<Vec<u64>>());
        assert!(c.wall_clock_secs.is_some());
    }
    assert_eq!(rep.comparisons.len(), 2);
    assert_eq!(rep.comparisons[0].reference, "lambda_0.3");
    assert_eq!(rep.prop2.len(), 5);
}

#[test]
fn persisted_aggregates_match_raw_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    run_experiment(&cfg).unwrap();
    let rows = read_trials_csv(&dir.path().join("trials.csv")).unwrap();
    let summary: ExperimentReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(rows.len(), 8 * 4);
    for c in &summary.conditions {
        let mine: Vec<_> = rows.iter().filter(|r| r.condition == c.label).collect();
        assert_eq!(mine.len(), c.n_trials);
        let check = |xs: Vec<f64>, agg: nichepop::harness::Aggregate| {
            assert!((mean(&xs) - agg.mean).abs() < 1e-9);
            assert!((sd(&xs) - agg.std).abs() < 1e-9);
        };
        check(mine.iter().map(|r| r.mean_si).collect(), c.mean_si);
        check(
            mine.iter().map(|r| r.effective_si).collect(),
            c.effective_si,
        );
        check(mine.iter().map(|r| r.coverage).collect(), c.coverage);
        check(mine.iter().map(|r| r.msi_mean).collect(), c.msi_mean);
        check(
            mine.iter().map(|r| r.distinct_niches as f64).collect(),
            c.distinct_niches,
        );
    }
    for p in &summary.sweep {
        let c = summary
            .conditions
            .iter()
            .find(|c| c.lambda == p.lambda && c.label.starts_with("lambda_"))
            .unwrap();
        assert_eq!(p.mean_si, c.mean_si.mean);
    }

    // Per-condition files carry the same rows.
    let sub = read_trials_csv(&dir.path().join("random/trials.csv")).unwrap();
    assert_eq!(
        sub,
        rows.iter()
            .filter(|r| r.condition == "random")
            .cloned()
            .collect::<Vec<_>>()
    );

    // Re-aggregation from the CSV reproduces the aggregates and the statistics.
    let again = report(dir.path(), 0.3).unwrap();
    assert!(dir.path().join("report.json").exists());
    for (a, b) in again.conditions.iter().zip(&summary.conditions) {
        assert_eq!(a.label, b.label);
        assert!((a.mean_si.mean - b.mean_si.mean).abs() < 1e-9);
        assert!((a.coverage.std - b.coverage.std).abs() < 1e-9);
    }
    assert_eq!(again.comparisons, summary.comparisons);
}

#[test]
fn iteration_logs_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(dir.path());
    cfg.sweep = Some(vec![0.2]);
    cfg.baselines.truncate(1);
    cfg.write_iterations = true;
    run_experiment(&cfg).unwrap();
    for c in ["lambda_0.2", "homogeneous"] {
        let text = fs::read_to_string(dir.path().join(c).join("iterations.csv")).unwrap();
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(
            &header[..6],
            ["condition", "seed", "t", "regime", "winner", "method_0"]
        );
        // 5 fixed + 3 per agent + R alpha columns per agent.
        assert_eq!(header.len(), 5 + 8 * 3 + 8 * 4);
        assert_eq!(lines.count(), 4 * 60);
    }
}

#[test]
fn config_round_trip_through_a_file() {
    let text = r#"
environment = "traffic6"
n_trials = 7
seed_base = 9
sweep = [0.0, 0.25, 0.5]
baselines = ["random"]
output_dir = "out/here"
write_iterations = true

[engine]
n_agents = 6
lambda = 0.25
eta = 0.2
iterations = 300
bonus_mode = "centered_additive"
belief_update = "unit"
affinity_floor = 0.02
reward_clamp_at_zero = false
noise_sharing = "per_method"
usage_counting = "wins"
"#;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.toml");
    fs::write(&path, text).unwrap();
    let cfg = ExperimentConfig::load(&path).unwrap();
    cfg.validate().unwrap();
    let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(cfg.engine.n_agents, 6);
    assert_eq!(cfg.sweep_values(), vec![0.0, 0.25, 0.5]);
}

#[test]
fn unwritable_output_is_an_io_error_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    let mut cfg = small(&file.join("nested"));
    cfg.n_trials = 1;
    match run_experiment(&cfg) {
        Err(Error::Io { path, .. }) => assert!(path.starts_with(&file)),
        other => panic!("expected an I/O error, got {other:?}"),
    }
}

#[test]
fn trials_csv_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&small(a.path())).unwrap();
    run_experiment(&small(b.path())).unwrap();
    assert_eq!(
        fs::read(a.path().join("trials.csv")).unwrap(),
        fs::read(b.path().join("trials.csv")).unwrap()
    );
}
