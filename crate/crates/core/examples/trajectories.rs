//! Steps one trial by hand and prints every agent's primary niche and SI
//! every 100 iterations.

use nichepop::env::builtin_environment;
use nichepop::metrics::specialization_index;
use nichepop::population::{EngineConfig, Policy, Trial};

fn main() -> nichepop::error::Result<()> {
    let env = builtin_environment("crypto4")?;
    let cfg = EngineConfig::default();
    let mut trial = Trial::new(&env, &cfg, Policy::NichePopulation, 42)?;
    while !trial.is_done() {
        trial.step()?;
        if trial.t() % 100 == 0 {
            let cells: Vec<String> = trial
                .agents()
                .iter()
                .map(|a| {
                    let si = specialization_index(&a.affinity).unwrap_or(0.0);
                    format!(
                        "{}:{:.2}",
                        env.affinity.regime_names()[a.affinity.primary().0],
                        si
                    )
                })
                .collect();
            println!("t={:<4} {}", trial.t(), cells.join(" "));
        }
    }
    Ok(())
}
