//! The lambda ablation on generic4, with the SI lower bound at each lambda.

use nichepop::harness::{execute, ExperimentConfig};

fn main() -> nichepop::error::Result<()> {
    let cfg = ExperimentConfig {
        baselines: vec![],
        ..ExperimentConfig::default()
    };
    let (report, _) = execute(&cfg)?;
    println!("lambda  mean_si  std");
    for p in &report.sweep {
        println!("{:<7} {:.4}   {:.4}", p.lambda, p.mean_si, p.std_si);
    }
    for b in &report.prop2 {
        println!(
            "lambda {}: bound {:.4}, observed {:.4} ({})",
            b.lambda,
            b.predicted_lower_bound,
            b.observed_mean_si,
            if b.satisfied { "holds" } else { "violated" }
        );
    }
    Ok(())
}
