//! The hand-traceable first iteration on crypto4: Bull regime, the winner's
//! affinity and belief update, and the SI values along the way.

use nichepop::env::builtin_environment;
use nichepop::metrics::specialization_index;
use nichepop::population::{adjusted_score, apply_winner_updates, BeliefUpdate, EngineConfig};
use nichepop::types::{AgentState, NicheAffinity};

fn main() -> nichepop::error::Result<()> {
    let env = builtin_environment("crypto4")?;
    let cfg = EngineConfig {
        belief_update: BeliefUpdate::Unit,
        ..EngineConfig::default()
    };
    let bull = env.affinity.regime_index("Bull").unwrap();
    let long = env.affinity.method_index("Momentum-Long").unwrap();

    let mut agent = AgentState::blank(env.n_regimes(), env.n_methods());
    println!("initial SI = {:.4}", specialization_index(&agent.affinity)?);

    // Uniform affinity: Bull is the primary niche by the lowest-index rule.
    let raw = 0.97;
    let score = adjusted_score(raw, &agent, bull, &cfg);
    println!("raw {raw} -> score {score:.4} (bonus {:.3})", score / raw);

    apply_winner_updates(&mut agent, bull, long, score, &cfg)?;
    let b = agent.belief(bull, long);
    println!("Beta(1,1) -> Beta({}, {})", b.success, b.failure);
    println!("affinity after one win: {:.3?}", agent.affinity.probs());
    println!("SI = {:.5}", specialization_index(&agent.affinity)?);

    let converged = NicheAffinity::new(vec![0.82, 0.06, 0.06, 0.06])?;
    println!(
        "SI(0.82, 0.06, 0.06, 0.06) = {:.4}",
        specialization_index(&converged)?
    );

    // Thirty more Bull wins.
    for _ in 0..30 {
        apply_winner_updates(&mut agent, bull, long, 1.0, &cfg)?;
    }
    println!(
        "after 31 wins: {:.3?}, SI = {:.3}",
        agent.affinity.probs(),
        specialization_index(&agent.affinity)?
    );
    Ok(())
}
