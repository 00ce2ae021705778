//! Competitive engine against Homogeneous and Random, with effect sizes,
//! Welch p-values, bootstrap CIs and Bonferroni thresholds. Writes the usual
//! artifacts to a temporary directory.

use nichepop::harness::{run_experiment, EnvironmentChoice, ExperimentConfig};

fn main() -> nichepop::error::Result<()> {
    let out = std::env::temp_dir().join("nichepop-baselines-example");
    let cfg = ExperimentConfig {
        environment: EnvironmentChoice::Builtin("crypto4".into()),
        sweep: Some(vec![0.3]),
        output_dir: out.clone(),
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&cfg)?;
    for c in &report.conditions {
        println!(
            "{:<12} SI {:.3} ± {:.3}  coverage {:.2}",
            c.label, c.mean_si.mean, c.mean_si.std, c.coverage.mean
        );
    }
    for c in &report.comparisons {
        let s = &c.result;
        println!(
            "{} vs {}: d = {:.2}, p = {:.2e} < {:.4}? {}, CI [{:.3}, {:.3}]",
            c.reference,
            c.baseline,
            s.cohens_d,
            s.p_value,
            s.bonferroni_alpha,
            s.p_value < s.bonferroni_alpha,
            s.ci_low,
            s.ci_high
        );
    }
    println!("artifacts in {}", out.display());
    Ok(())
}
