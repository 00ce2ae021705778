//! Multi-seed trial orchestration and aggregation.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    compare_samples, mean, prop2_bound_check, std_dev, BoundCheck, StatResult, PROP2_DEFAULT_MARGIN,
};
use crate::env::EnvironmentSpec;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::output::write_artifacts;
use crate::population::{BaselineKind, EngineConfig, Policy, Trial, TrialRecord};

/// Family-wise significance level for the baseline comparisons.
pub const COMPARISON_ALPHA: f64 = 0.05;

/// One cell of the experiment: a policy at a given lambda.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub policy: Policy,
    pub lambda: f64,
}

impl Condition {
    pub fn niche(lambda: f64) -> Self {
        Self {
            label: format!("lambda_{lambda}"),
            policy: Policy::NichePopulation,
            lambda,
        }
    }

    /// Baselines always run at lambda = 0.
    pub fn baseline(kind: BaselineKind) -> Self {
        Self {
            label: kind.label().to_string(),
            policy: kind.into(),
            lambda: 0.0,
        }
    }

    /// Inverse of the labelling used in `trials.csv`.
    pub fn from_label(label: &str, lambda: f64) -> Self {
        match label {
            "homogeneous" => Self::baseline(BaselineKind::Homogeneous),
            "random" => Self::baseline(BaselineKind::Random),
            _ => Self {
                label: label.to_string(),
                policy: Policy::NichePopulation,
                lambda,
            },
        }
    }
}

/// The per-trial row persisted in `trials.csv`. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub condition: String,
    pub lambda: f64,
    pub seed: u64,
    pub mean_si: f64,
    pub effective_si: f64,
    pub coverage: f64,
    pub msi_mean: f64,
    pub distinct_niches: usize,
}

impl TrialRow {
    pub fn new(condition: &Condition, record: &TrialRecord) -> Self {
        let s = &record.summary;
        Self {
            condition: condition.label.clone(),
            lambda: condition.lambda,
            seed: record.seed,
            mean_si: s.mean_si,
            effective_si: s.effective_si,
            coverage: s.coverage,
            msi_mean: s.mean_msi(),
            distinct_niches: s.distinct_primary_niches,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std: f64,
}

impl Aggregate {
    pub fn of(xs: &[f64]) -> Self {
        Self {
            mean: mean(xs),
            std: if xs.len() > 1 { std_dev(xs) } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub label: String,
    pub policy: Policy,
    pub lambda: f64,
    pub n_trials: usize,
    pub seeds: Vec<u64>,
    pub mean_si: Aggregate,
    pub effective_si: Aggregate,
    pub coverage: Aggregate,
    pub msi_mean: Aggregate,
    pub distinct_niches: Aggregate,
    pub wall_clock_secs: Option<f64>,
}

impl ConditionReport {
    pub fn from_rows(
        condition: &Condition,
        rows: &[TrialRow],
        wall_clock_secs: Option<f64>,
    ) -> Self {
        let col = |f: fn(&TrialRow) -> f64| Aggregate::of(&rows.iter().map(f).collect::<Vec<_>>());
        Self {
            label: condition.label.clone(),
            policy: condition.policy,
            lambda: condition.lambda,
            n_trials: rows.len(),
            seeds: rows.iter().map(|r| r.seed).collect(),
            mean_si: col(|r| r.mean_si),
            effective_si: col(|r| r.effective_si),
            coverage: col(|r| r.coverage),
            msi_mean: col(|r| r.msi_mean),
            distinct_niches: col(|r| r.distinct_niches as f64),
            wall_clock_secs,
        }
    }
}

/// Mean SI of the reference competitive condition against a baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reference: String,
    pub baseline: String,
    pub result: StatResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub mean_si: f64,
    pub std_si: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub environment: String,
    pub n_trials: usize,
    pub seed_base: u64,
    pub engine: Option<EngineConfig>,
    pub conditions: Vec<ConditionReport>,
    pub comparisons: Vec<Comparison>,
    pub sweep: Vec<SweepPoint>,
    pub prop2: Vec<BoundCheck>,
}

impl ExperimentReport {
    pub fn condition(&self, label: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.label == label)
    }

    pub fn comparison(&self, baseline: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.baseline == baseline)
    }
}

/// Raw results of one condition, in seed order.
#[derive(Debug, Clone)]
pub struct ConditionRun {
    pub condition: Condition,
    pub records: Vec<TrialRecord>,
    pub wall_clock_secs: f64,
}

impl ConditionRun {
    pub fn rows(&self) -> Vec<TrialRow> {
        self.records
            .iter()
            .map(|r| TrialRow::new(&self.condition, r))
            .collect()
    }
}

/// Sweep conditions first (in sweep order), then baselines (in config order).
pub fn conditions(cfg: &ExperimentConfig) -> Vec<Condition> {
    cfg.sweep_values()
        .into_iter()
        .map(Condition::niche)
        .chain(cfg.baselines.iter().map(|b| Condition::baseline(*b)))
        .collect()
}

/// Runs trial `i` with seed `seed_base + i` for every `i < n_trials`. Trials run
/// in parallel; results come back in seed order. Iteration logs are dropped
/// unless `keep_iterations`.
pub fn run_condition(
    env: &EnvironmentSpec,
    engine: &EngineConfig,
    condition: &Condition,
    n_trials: usize,
    seed_base: u64,
    keep_iterations: bool,
) -> Result<ConditionRun> {
    let mut cfg = engine.clone();
    cfg.lambda = condition.lambda;
    let start = Instant::now();
    let records = (0..n_trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rec = Trial::new(env, &cfg, condition.policy, seed_base + i)?.run()?;
            if !keep_iterations {
                rec.iterations = Vec::new();
            }
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionRun {
        condition: condition.clone(),
        records,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Index of the competitive condition whose lambda is closest to `lambda`
/// (first on ties).
fn reference_index(conditions: &[&ConditionReport], lambda: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in conditions.iter().enumerate() {
        let d = (c.lambda - lambda).abs();
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Aggregates persisted or freshly produced rows into a report. Rows are
/// grouped by condition label in order of first appearance. `engine` and
/// `n_regimes` enable the bound checks.
pub fn build_report(
    environment: &str,
    seed_base: u64,
    rows: &[TrialRow],
    wall_clock: &[(String, f64)],
    reference_lambda: f64,
    engine: Option<(&EngineConfig, usize)>,
) -> Result<ExperimentReport> {
    let mut groups: Vec<(Condition, Vec<TrialRow>)> = Vec::new();
    for row in rows {
        match groups.iter_mut().find(|(c, _)| c.label == row.condition) {
            Some((_, g)) => g.push(row.clone()),
            None => groups.push((
                Condition::from_label(&row.condition, row.lambda),
                vec![row.clone()],
            )),
        }
    }
    let conditions: Vec<ConditionReport> = groups
        .iter()
        .map(|(c, g)| {
            let secs = wall_clock
                .iter()
                .find(|(l, _)| *l == c.label)
                .map(|(_, s)| *s);
            ConditionReport::from_rows(c, g, secs)
        })
        .collect();
    let si = |label: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.condition == label)
            .map(|r| r.mean_si)
            .collect()
    };

    let niche: Vec<&ConditionReport> = conditions
        .iter()
        .filter(|c| c.policy == Policy::NichePopulation)
        .collect();
    let sweep = niche
        .iter()
        .map(|c| SweepPoint {
            lambda: c.lambda,
            mean_si: c.mean_si.mean,
            std_si: c.mean_si.std,
        })
        .collect();

    let baselines: Vec<&ConditionReport> = conditions
        .iter()
        .filter(|c| c.policy != Policy::NichePopulation)
        .collect();
    let mut comparisons = Vec::new();
    if let Some(i) = reference_index(&niche, reference_lambda) {
        let reference = niche[i];
        let a = si(&reference.label);
        for b in &baselines {
            let bs = si(&b.label);
            if a.len() < 2 || bs.len() < 2 {
                continue;
            }
            comparisons.push(Comparison {
                reference: reference.label.clone(),
                baseline: b.label.clone(),
                result: compare_samples(&a, &bs, COMPARISON_ALPHA, baselines.len())?,
            });
        }
    }

    let mut prop2 = Vec::new();
    if let Some((cfg, n_regimes)) = engine {
        if n_regimes >= 2 {
            for c in niche.iter().filter(|c| c.lambda > 0.0) {
                prop2.push(prop2_bound_check(
                    c.lambda,
                    cfg.eta,
                    cfg.iterations,
                    n_regimes,
                    &si(&c.label),
                    PROP2_DEFAULT_MARGIN,
                )?);
            }
        }
    }

    Ok(ExperimentReport {
        environment: environment.to_string(),
        n_trials: conditions.first().map_or(0, |c| c.n_trials),
        seed_base,
        engine: engine.map(|(c, _)| c.clone()),
        conditions,
        comparisons,
        sweep,
        prop2,
    })
}

/// Runs every condition without touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<(ExperimentReport, Vec<ConditionRun>)> {
    let env = cfg.validate()?;
    let runs = conditions(cfg)
        .iter()
        .map(|c| {
            run_condition(
                &env,
                &cfg.engine,
                c,
                cfg.n_trials,
                cfg.seed_base,
                cfg.write_iterations,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<TrialRow> = runs.iter().flat_map(ConditionRun::rows).collect();
    let clock: Vec<(String, f64)> = runs
        .iter()
        .map(|r| (r.condition.label.clone(), r.wall_clock_secs))
        .collect();
    let report = build_report(
        &env.name,
        cfg.seed_base,
        &rows,
        &clock,
        cfg.engine.lambda,
        Some((&cfg.engine, env.n_regimes())),
    )?;
    Ok((report, runs))
}

/// Runs the experiment and writes its artifacts under `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (report, runs) = execute(cfg)?;
    write_artifacts(&cfg.output_dir, &report, &runs, cfg.write_iterations)?;
    Ok(report)
}
