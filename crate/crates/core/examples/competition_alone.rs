//! Specialization with the niche bonus switched off (lambda = 0), compared
//! with the Random baseline on two environments.

use nichepop::analysis::two_sample_t_test;
use nichepop::env::builtin_environment;
use nichepop::harness::{run_condition, Condition};
use nichepop::population::{BaselineKind, EngineConfig};

fn main() -> nichepop::error::Result<()> {
    let cfg = EngineConfig::default();
    for name in ["generic4", "crypto4"] {
        let env = builtin_environment(name)?;
        let si = |c: &Condition| -> nichepop::error::Result<Vec<f64>> {
            let run = run_condition(&env, &cfg, c, 30, 42, false)?;
            Ok(run.rows().iter().map(|r| r.mean_si).collect())
        };
        let niche = si(&Condition::niche(0.0))?;
        let random = si(&Condition::baseline(BaselineKind::Random))?;
        let s = two_sample_t_test(&niche, &random)?;
        println!(
            "{name}: lambda=0 SI {:.3} vs random {:.3}  d = {:.2}, p = {:.2e}",
            s.mean_a, s.mean_b, s.cohens_d, s.p_value
        );
    }
    Ok(())
}
