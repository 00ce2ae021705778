//! Configuration, multi-seed orchestration, persistence and the CLI.

pub mod cli;
pub mod config;
pub mod output;
pub mod runner;
pub mod theory;

pub use config::{EnvironmentChoice, ExperimentConfig, DEFAULT_SWEEP};
pub use runner::{
    build_report, conditions, execute, run_condition, run_experiment, Aggregate, Comparison,
    Condition, ConditionReport, ConditionRun, ExperimentReport, SweepPoint, TrialRow,
};
pub use theory::{crowding_summary, run_theory, CrowdingSummary, TheoryReport};
