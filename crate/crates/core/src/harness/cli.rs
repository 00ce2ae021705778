//! The `nichepop` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::config::{EnvironmentChoice, ExperimentConfig};
use crate::harness::output::{read_trials_csv, write_json, write_trials_csv};
use crate::harness::runner::{build_report, run_experiment, ConditionRun, ExperimentReport};
use crate::harness::theory::{run_theory, TheoryReport};
use crate::population::{BaselineKind, BeliefUpdate, BonusMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nichepop",
    version,
    about = "Emergent specialization in competing learner populations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the competitive engine at a single lambda.
    Simulate(RunArgs),
    /// Run the lambda sweep.
    Sweep(RunArgs),
    /// Compare the competitive engine against the Homogeneous and Random baselines.
    Baselines(RunArgs),
    /// Check crowding deviations, the SI lower bound and single-regime collapse.
    Theory(RunArgs),
    /// Re-aggregate an existing trials.csv into report.json.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// ExperimentConfig TOML file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin environment name (crypto4, generic4, traffic6, mono1).
    #[arg(long)]
    env: Option<String>,
    /// Niche bonus coefficient.
    #[arg(long)]
    lambda: Option<f64>,
    /// Affinity learning rate.
    #[arg(long)]
    eta: Option<f64>,
    /// Number of agents.
    #[arg(long)]
    agents: Option<usize>,
    /// Iterations per trial.
    #[arg(long)]
    iters: Option<usize>,
    /// Trials per condition.
    #[arg(long)]
    trials: Option<usize>,
    /// Seed base; trial i uses seed + i.
    #[arg(long, env = "NICHEPOP_SEED")]
    seed: Option<u64>,
    /// multiplicative | centered-additive
    #[arg(long, value_parser = parse_bonus_mode)]
    bonus_mode: Option<BonusMode>,
    /// reward-weighted | unit
    #[arg(long, value_parser = parse_belief_update)]
    belief_update: Option<BeliefUpdate>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-iteration logs.
    #[arg(long)]
    log_iterations: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory holding trials.csv.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Lambda of the competitive condition compared against the baselines.
    #[arg(long, default_value_t = 0.3)]
    lambda: f64,
}

fn parse_bonus_mode(s: &str) -> std::result::Result<BonusMode, String> {
    match s.replace('-', "_").as_str() {
        "multiplicative" => Ok(BonusMode::Multiplicative),
        "centered_additive" => Ok(BonusMode::CenteredAdditive),
        _ => Err("expected multiplicative or centered-additive".into()),
    }
}

fn parse_belief_update(s: &str) -> std::result::Result<BeliefUpdate, String> {
    match s.replace('-', "_").as_str() {
        "reward_weighted" => Ok(BeliefUpdate::RewardWeighted),
        "unit" => Ok(BeliefUpdate::Unit),
        _ => Err("expected reward-weighted or unit".into()),
    }
}

impl RunArgs {
    /// File values, then flags (the seed flag also reads NICHEPOP_SEED).
    fn to_config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(env) = &self.env {
            cfg.environment = EnvironmentChoice::Builtin(env.clone());
        }
        let e = &mut cfg.engine;
        if let Some(v) = self.lambda {
            e.lambda = v;
        }
        if let Some(v) = self.eta {
            e.eta = v;
        }
        if let Some(v) = self.agents {
            e.n_agents = v;
        }
        if let Some(v) = self.iters {
            e.iterations = v;
        }
        if let Some(v) = self.bonus_mode {
            e.bonus_mode = v;
        }
        if let Some(v) = self.belief_update {
            e.belief_update = v;
        }
        if let Some(v) = self.trials {
            cfg.n_trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed_base = v;
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if self.log_iterations {
            cfg.write_iterations = true;
        }
        Ok(cfg)
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config { .. }
            | Error::UnknownEnvironment(_)
            | Error::Io { .. }
            | Error::Format { .. }
    )
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if let Command::Report(args) = &cli.command {
        return match report(&args.out, args.lambda) {
            Ok(r) => {
                print_report(&r);
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                if is_config_error(&e) {
                    EXIT_CONFIG
                } else {
                    EXIT_RUNTIME
                }
            }
        };
    }

    let (Command::Simulate(args)
    | Command::Sweep(args)
    | Command::Baselines(args)
    | Command::Theory(args)) = &cli.command
    else {
        unreachable!("report handled above")
    };
    let cfg = match args.to_config().and_then(|mut cfg| {
        shape(&cli.command, &mut cfg);
        cfg.validate().map(|_| cfg)
    }) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };

    let outcome = match cli.command {
        Command::Theory(_) => theory(&cfg),
        _ => run_experiment(&cfg).map(|r| print_report(&r)),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

/// Restricts the conditions to what each subcommand is about.
fn shape(command: &Command, cfg: &mut ExperimentConfig) {
    match command {
        Command::Simulate(_) => {
            cfg.sweep = Some(vec![cfg.engine.lambda]);
            cfg.baselines.clear();
        }
        Command::Sweep(_) => cfg.baselines.clear(),
        Command::Baselines(_) => {
            cfg.sweep = Some(vec![cfg.engine.lambda]);
            if cfg.baselines.is_empty() {
                cfg.baselines = vec![BaselineKind::Homogeneous, BaselineKind::Random];
            }
        }
        Command::Theory(_) | Command::Report(_) => {}
    }
}

/// Rebuilds the report from `dir/trials.csv` and writes `dir/report.json`.
pub fn report(dir: &Path, reference_lambda: f64) -> Result<ExperimentReport> {
    let rows = read_trials_csv(&dir.join("trials.csv"))?;
    let seed_base = rows.iter().map(|r| r.seed).min().unwrap_or(0);
    let report = build_report("", seed_base, &rows, &[], reference_lambda, None)?;
    write_json(&dir.join("report.json"), &report)?;
    Ok(report)
}

fn theory(cfg: &ExperimentConfig) -> Result<()> {
    let (rep, runs) = run_theory(cfg)?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    let rows: Vec<_> = runs.iter().flat_map(ConditionRun::rows).collect();
    write_trials_csv(&cfg.output_dir.join("trials.csv"), &rows)?;
    write_json(&cfg.output_dir.join("theory.json"), &rep)?;
    print_theory(&rep);
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn print_theory(rep: &TheoryReport) {
    let c = &rep.crowding;
    println!(
        "prop1 {}: {}/{} crowded occupancies of N={} into R={} admit a profitable deviation",
        verdict(c.every_crowded_occupancy_deviates()),
        c.with_deviation,
        c.crowded_occupancies,
        c.n_agents,
        c.n_regimes
    );
    for occ in &c.stable {
        println!("  stable: {occ:?}");
    }
    if let Some(d) = &c.example.deviation {
        println!(
            "  example {:?}: niche {} -> {} raises payoff {:.4} -> {:.4}",
            c.example.occupancy, d.from, d.to, d.payoff_before, d.payoff_after
        );
    }
    for b in &rep.bound {
        println!(
            "prop2 {}: lambda={} observed mean SI {:.4} vs bound {:.4} (margin {})",
            verdict(b.satisfied),
            b.lambda,
            b.observed_mean_si,
            b.predicted_lower_bound,
            b.margin
        );
    }
    let p = &rep.collapse;
    println!(
        "prop3 {}: mono1 mean effective_si {:.4}, single-niche trials {:.0}% (n={})",
        verdict(p.passed),
        p.mean_effective_si,
        100.0 * p.single_niche_fraction,
        p.n_trials
    );
}

fn print_report(r: &ExperimentReport) {
    println!(
        "{:<18} {:>6} {:>18} {:>18} {:>10} {:>10} {:>9}",
        "condition", "trials", "mean_si", "effective_si", "coverage", "msi_mean", "secs"
    );
    for c in &r.conditions {
        println!(
            "{:<18} {:>6} {:>9.4} ± {:<6.4} {:>9.4} ± {:<6.4} {:>10.4} {:>10.4} {:>9}",
            c.label,
            c.n_trials,
            c.mean_si.mean,
            c.mean_si.std,
            c.effective_si.mean,
            c.effective_si.std,
            c.coverage.mean,
            c.msi_mean.mean,
            c.wall_clock_secs.map_or("-".into(), |s| format!("{s:.2}")),
        );
    }
    for cmp in &r.comparisons {
        let s = &cmp.result;
        println!(
            "{} vs {}: d = {:.3}, t = {:.3}, p = {:.3e} (Bonferroni alpha {:.4}), 95% CI [{:.4}, {:.4}]",
            cmp.reference, cmp.baseline, s.cohens_d, s.t_statistic, s.p_value, s.bonferroni_alpha, s.ci_low, s.ci_high
        );
    }
    for b in &r.prop2 {
        println!(
            "bound lambda={}: observed {:.4} vs {:.4} -> {}",
            b.lambda,
            b.observed_mean_si,
            b.predicted_lower_bound,
            verdict(b.satisfied)
        );
    }
}
