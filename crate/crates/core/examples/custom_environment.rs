//! An inline environment in a TOML experiment config: a three-regime Markov
//! chain with sticky regimes.

use nichepop::harness::{execute, ExperimentConfig};

const CONFIG: &str = r#"
n_trials = 10
sweep = [0.0, 0.3]
baselines = ["random"]

[engine]
iterations = 400

[environment]
name = "sticky3"
noise_sigma = 0.1

[environment.affinity]
values = [
  [0.9, 0.3, 0.4],
  [0.2, 0.8, 0.5],
  [0.4, 0.3, 0.9],
]
regime_names = ["calm", "trend", "shock"]
method_names = ["hold", "follow", "hedge"]

[environment.process]
kind = "markov"
stationary = [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]
transition = [
  [0.8, 0.1, 0.1],
  [0.1, 0.8, 0.1],
  [0.1, 0.1, 0.8],
]
"#;

fn main() -> nichepop::error::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let (report, _) = execute(&cfg)?;
    for c in &report.conditions {
        println!(
            "{:<10} SI {:.3}, niches {:.2}",
            c.label, c.mean_si.mean, c.distinct_niches.mean
        );
    }
    println!("\nround-tripped config:\n{}", cfg.to_toml_string()?);
    Ok(())
}
