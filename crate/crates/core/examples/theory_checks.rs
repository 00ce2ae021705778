//! Crowding deviations over every occupancy, the SI lower bound, and collapse
//! in a single-regime environment.

use nichepop::analysis::{prop1_deviation_check, prop2_bound};
use nichepop::harness::{crowding_summary, run_theory, ExperimentConfig};

fn main() -> nichepop::error::Result<()> {
    let rep = prop1_deviation_check(&[1.0; 4], &[5, 1, 1, 1])?;
    println!("(5,1,1,1): {:?}", rep.deviation);
    let rep = prop1_deviation_check(&[1.0; 4], &[2, 2, 2, 2])?;
    println!("(2,2,2,2): {:?}", rep.deviation);

    let s = crowding_summary(8, 4)?;
    println!(
        "{} of {} crowded occupancies deviate; stable: {:?}",
        s.with_deviation, s.crowded_occupancies, s.stable
    );

    println!(
        "bound at lambda=0.3, R=4, T=500: {:.4}",
        prop2_bound(0.3, 0.1, 500, 4)?
    );

    let cfg = ExperimentConfig {
        n_trials: 10,
        ..ExperimentConfig::default()
    };
    let (theory, _) = run_theory(&cfg)?;
    for b in &theory.bound {
        println!(
            "lambda {}: {:.3} >= {:.3}? {}",
            b.lambda, b.observed_mean_si, b.predicted_lower_bound, b.satisfied
        );
    }
    println!("collapse on mono1: {:?}", theory.collapse);
    Ok(())
}
