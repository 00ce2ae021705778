//! CSV and JSON artifacts.
//!
//! Layout under the output directory:
//!
//! ```text
//! trials.csv        one row per (condition, trial)
//! sweep.csv         lambda, mean_si, std_si for the competitive conditions
//! summary.json      the full ExperimentReport
//! <condition>/trials.csv
//! <condition>/summary.json
//! <condition>/iterations.csv   only when iteration logging is on
//! ```

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::runner::{ConditionRun, ExperimentReport, SweepPoint, TrialRow};

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!("checked by is_io_error"),
        }
    } else {
        Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_trials_csv(path: &Path, rows: &[TrialRow]) -> Result<()> {
    if rows.is_empty() {
        // serde-driven writers only emit headers alongside a first record.
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(TRIAL_COLUMNS)
            .map_err(|e| csv_error(path, e))?;
        return w.flush().map_err(|e| Error::io(path, e));
    }
    write_rows(path, rows)
}

pub const TRIAL_COLUMNS: [&str; 8] = [
    "condition",
    "lambda",
    "seed",
    "mean_si",
    "effective_si",
    "coverage",
    "msi_mean",
    "distinct_niches",
];

pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().ne(TRIAL_COLUMNS) {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("expected columns {TRIAL_COLUMNS:?}, found {headers:?}"),
        });
    }
    r.deserialize()
        .collect::<std::result::Result<Vec<TrialRow>, _>>()
        .map_err(|e| csv_error(path, e))
}

pub fn write_sweep_csv(path: &Path, sweep: &[SweepPoint]) -> Result<()> {
    write_rows(path, sweep)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// One row per iteration per trial: the regime, the winner, every agent's
/// method, raw reward and score, then every agent's affinity after the update.
pub fn write_iterations_csv(path: &Path, run: &ConditionRun) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let Some(first) = run.records.first() else {
        return w.flush().map_err(|e| Error::io(path, e));
    };
    let n_agents = first.final_agents.len();
    let n_regimes = first.final_agents.first().map_or(0, |a| a.n_regimes());

    let mut header = vec![
        "condition".to_string(),
        "seed".into(),
        "t".into(),
        "regime".into(),
        "winner".into(),
    ];
    for i in 0..n_agents {
        header.extend([
            format!("method_{i}"),
            format!("raw_{i}"),
            format!("score_{i}"),
        ]);
    }
    for i in 0..n_agents {
        header.extend((0..n_regimes).map(|r| format!("alpha_{i}_{r}")));
    }
    w.write_record(&header).map_err(|e| csv_error(path, e))?;

    for rec in &run.records {
        // Replay the affinity trajectory: only the winner moves each iteration.
        let mut alpha = vec![vec![1.0 / n_regimes as f64; n_regimes]; n_agents];
        for it in &rec.iterations {
            alpha[it.winner] = it.winner_affinity.clone();
            let mut fields = vec![
                run.condition.label.clone(),
                rec.seed.to_string(),
                it.t.to_string(),
                it.regime.0.to_string(),
                it.winner.to_string(),
            ];
            for i in 0..n_agents {
                fields.push(it.selections[i].0.to_string());
                fields.push(it.raw_rewards[i].to_string());
                fields.push(it.scores[i].to_string());
            }
            for a in &alpha {
                fields.extend(a.iter().map(f64::to_string));
            }
            w.write_record(&fields).map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_artifacts(
    dir: &Path,
    report: &ExperimentReport,
    runs: &[ConditionRun],
    write_iterations: bool,
) -> Result<()> {
    create_dir(dir)?;
    let rows: Vec<TrialRow> = runs.iter().flat_map(ConditionRun::rows).collect();
    write_trials_csv(&dir.join("trials.csv"), &rows)?;
    if !report.sweep.is_empty() {
        write_sweep_csv(&dir.join("sweep.csv"), &report.sweep)?;
    }
    write_json(&dir.join("summary.json"), report)?;

    for run in runs {
        let sub = dir.join(&run.condition.label);
        create_dir(&sub)?;
        write_trials_csv(&sub.join("trials.csv"), &run.rows())?;
        if let Some(c) = report.condition(&run.condition.label) {
            write_json(&sub.join("summary.json"), c)?;
        }
        if write_iterations {
            write_iterations_csv(&sub.join("iterations.csv"), run)?;
        }
    }
    Ok(())
}
