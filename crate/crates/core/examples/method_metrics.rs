//! Method-level division of labor: MSI per agent and population coverage,
//! with selection counting and with win counting.

use nichepop::env::builtin_environment;
use nichepop::population::{run_trial, EngineConfig, UsageCounting};

fn main() -> nichepop::error::Result<()> {
    let env = builtin_environment("generic4")?;
    for counting in [UsageCounting::Selections, UsageCounting::Wins] {
        let cfg = EngineConfig {
            usage_counting: counting,
            ..EngineConfig::default()
        };
        let rec = run_trial(&env, &cfg, 42)?;
        println!(
            "{counting:?}: coverage {:.2}, mean MSI {:.3}",
            rec.summary.coverage,
            rec.summary.mean_msi()
        );
        for (i, a) in rec.final_agents.iter().enumerate() {
            println!(
                "  agent {i}: usage {:?}  MSI {:.3}",
                a.method_usage_counts, rec.summary.msi_per_agent[i]
            );
        }
    }
    Ok(())
}
