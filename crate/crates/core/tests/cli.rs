use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nichepop::harness::output::read_trials_csv;

fn nichepop(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nichepop"));
    cmd.args(args).env_remove("NICHEPOP_SEED");
    if let Some(s) = seed_env {
        cmd.env("NICHEPOP_SEED", s);
    }
    cmd.output().unwrap()
}

fn out_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_twice_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = nichepop(
            &[
                "simulate",
                "--trials",
                "1",
                "--seed",
                "7",
                "--out",
                out_arg(d.path()),
            ],
            None,
        );
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let ta = fs::read(a.path().join("trials.csv")).unwrap();
    assert_eq!(ta, fs::read(b.path().join("trials.csv")).unwrap());
    let rows = read_trials_csv(&a.path().join("trials.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(
        (rows[0].seed, rows[0].condition.as_str()),
        (7, "lambda_0.3")
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(nichepop(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(
        nichepop(&["simulate", "--bogus"], None).status.code(),
        Some(1)
    );
    assert_eq!(nichepop(&[], None).status.code(), Some(1));
    assert_eq!(
        nichepop(&["simulate", "--trials", "0"], None).status.code(),
        Some(1)
    );
    assert_eq!(
        nichepop(&["simulate", "--env", "mars"], None).status.code(),
        Some(1)
    );
    assert_eq!(
        nichepop(&["simulate", "--bonus-mode", "quadratic"], None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        nichepop(&["simulate"], Some("not-a-number")).status.code(),
        Some(1)
    );
    let o = nichepop(&["simulate", "--config", "/nonexistent/exp.toml"], None);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(nichepop(&["--help"], None).status.code(), Some(0));
    assert_eq!(nichepop(&["sweep", "--help"], None).status.code(), Some(0));
}

#[test]
fn bad_config_field_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[engine]\neta = 3.0\n").unwrap();
    let o = nichepop(&["simulate", "--config", path.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("engine.eta"));
}

#[test]
fn runtime_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("blocker");
    fs::write(&file, "").unwrap();
    let out = file.join("sub");
    let o = nichepop(
        &[
            "simulate",
            "--trials",
            "1",
            "--iters",
            "20",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_precedence_flag_env_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "seed_base = 100\nn_trials = 2\n[engine]\niterations = 20\n",
    )
    .unwrap();
    let seeds = |args: &[&str], env: Option<&str>, sub: &str| {
        let out = dir.path().join(sub);
        let mut all = vec![
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        all.extend_from_slice(args);
        assert_eq!(nichepop(&all, env).status.code(), Some(0));
        read_trials_csv(&out.join("trials.csv"))
            .unwrap()
            .iter()
            .map(|r| r.seed)
            .collect::<Vec<_>>()
    };
    assert_eq!(seeds(&[], None, "file"), [100, 101]);
    assert_eq!(seeds(&[], Some("500"), "env"), [500, 501]);
    assert_eq!(seeds(&["--seed", "9"], Some("500"), "flag"), [9, 10]);
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "environment = \"crypto4\"\nn_trials = 3\n[engine]\niterations = 20\nlambda = 0.1\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = nichepop(
        &[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--lambda",
            "0.4",
            "--trials",
            "2",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["environment"], "crypto4");
    assert_eq!(summary["engine"]["lambda"], 0.4);
    assert_eq!(summary["engine"]["iterations"], 20);
    assert_eq!(summary["conditions"][0]["label"], "lambda_0.4");
    assert_eq!(summary["conditions"][0]["n_trials"], 2);
}

#[test]
fn baselines_report_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let o = nichepop(
        &[
            "baselines",
            "--trials",
            "5",
            "--iters",
            "100",
            "--out",
            out_arg(dir.path()),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("lambda_0.3 vs homogeneous"));
    assert!(stdout.contains("lambda_0.3 vs random"));
    let rows = read_trials_csv(&dir.path().join("trials.csv")).unwrap();
    assert_eq!(rows.len(), 15);
}

#[test]
fn sweep_on_generic4_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let o = nichepop(
        &["sweep", "--env", "generic4", "--out", out_arg(dir.path())],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let si: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(si.len(), 6);
    for w in si[..5].windows(2) {
        assert!(w[1] >= w[0] - 0.03, "{si:?}");
    }
}

#[test]
fn theory_prints_each_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = nichepop(
        &[
            "theory",
            "--env",
            "mono1",
            "--trials",
            "5",
            "--out",
            out_arg(dir.path()),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("prop1 "));
    assert_eq!(stdout.matches("prop2 ").count(), 4);
    assert!(stdout
        .lines()
        .any(|l| l.starts_with("prop3 PASS") || l.starts_with("prop3 FAIL")));
    assert!(dir.path().join("theory.json").exists());
}

#[test]
fn report_reaggregates() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        nichepop(
            &[
                "baselines",
                "--trials",
                "3",
                "--iters",
                "30",
                "--out",
                out_arg(dir.path())
            ],
            None
        )
        .status
        .code(),
        Some(0)
    );
    let o = nichepop(&["report", "--out", out_arg(dir.path())], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("report.json").exists());
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(
        nichepop(&["report", "--out", out_arg(empty.path())], None)
            .status
            .code(),
        Some(1)
    );
}
