//! Runs the three proposition checks end to end.

use serde::{Deserialize, Serialize};

use crate::analysis::{
    compositions, prop1_deviation_check, prop3_collapse_check, BoundCheck, CollapseReport,
    DeviationReport,
};
use crate::env::builtin_environment;
use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::runner::{build_report, run_condition, Condition, ConditionRun};

/// Lambdas probed for the SI lower bound unless the config lists its own.
pub const PROP2_LAMBDAS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrowdingSummary {
    pub n_agents: usize,
    pub n_regimes: usize,
    pub occupancies: usize,
    pub crowded_occupancies: usize,
    pub with_deviation: usize,
    /// Crowded occupancies where no agent can gain by moving.
    pub stable: Vec<Vec<usize>>,
    /// The check applied to `(N - R + 1, 1, ..., 1)`, or `(N, 0, ..., 0)` when `N < R`.
    pub example: DeviationReport,
}

impl CrowdingSummary {
    pub fn every_crowded_occupancy_deviates(&self) -> bool {
        self.stable.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub crowding: CrowdingSummary,
    pub bound: Vec<BoundCheck>,
    pub collapse: CollapseReport,
}

/// Runs the deviation check over every occupancy of `n_agents` into
/// `n_regimes` equally valuable niches.
pub fn crowding_summary(n_agents: usize, n_regimes: usize) -> Result<CrowdingSummary> {
    let values = vec![1.0; n_regimes];
    let all = compositions(n_agents, n_regimes);
    let mut crowded = 0;
    let mut with_deviation = 0;
    let mut stable = Vec::new();
    for occ in &all {
        let rep = prop1_deviation_check(&values, occ)?;
        if rep.crowded.is_empty() {
            continue;
        }
        crowded += 1;
        if rep.deviation.is_some() {
            with_deviation += 1;
        } else {
            stable.push(occ.to_vec());
        }
    }
    let example = if n_agents >= n_regimes {
        let mut e = vec![1; n_regimes];
        e[0] = n_agents + 1 - n_regimes;
        e
    } else {
        let mut e = vec![0; n_regimes];
        e[0] = n_agents;
        e
    };
    Ok(CrowdingSummary {
        n_agents,
        n_regimes,
        occupancies: all.len(),
        crowded_occupancies: crowded,
        with_deviation,
        stable,
        example: prop1_deviation_check(&values, &example)?,
    })
}

/// Crowding over all occupancies, the SI bound on the configured environment,
/// and collapse on `mono1` (always, whatever environment is configured).
pub fn run_theory(cfg: &ExperimentConfig) -> Result<(TheoryReport, Vec<ConditionRun>)> {
    let env = cfg.validate()?;
    let crowding = crowding_summary(cfg.engine.n_agents, env.n_regimes())?;

    let lambdas: Vec<f64> = match &cfg.sweep {
        Some(s) => s.iter().copied().filter(|l| *l > 0.0).collect(),
        None => PROP2_LAMBDAS.to_vec(),
    };
    let mut runs = Vec::new();
    for l in lambdas {
        runs.push(run_condition(
            &env,
            &cfg.engine,
            &Condition::niche(l),
            cfg.n_trials,
            cfg.seed_base,
            false,
        )?);
    }
    let rows: Vec<_> = runs.iter().flat_map(ConditionRun::rows).collect();
    let bound = build_report(
        &env.name,
        cfg.seed_base,
        &rows,
        &[],
        cfg.engine.lambda,
        Some((&cfg.engine, env.n_regimes())),
    )?
    .prop2;

    let mono = builtin_environment("mono1")?;
    let mut mono_run = run_condition(
        &mono,
        &cfg.engine,
        &Condition::niche(cfg.engine.lambda),
        cfg.n_trials,
        cfg.seed_base,
        false,
    )?;
    mono_run.condition.label = format!("mono1_lambda_{}", cfg.engine.lambda);
    let summaries: Vec<_> = mono_run.records.iter().map(|r| r.summary.clone()).collect();
    let collapse = prop3_collapse_check(&summaries)?;
    runs.push(mono_run);

    Ok((
        TheoryReport {
            crowding,
            bound,
            collapse,
        },
        runs,
    ))
}
