//! IID and Markov regime processes: empirical frequencies against the
//! declared stationary distribution, and the effective regime count.

use nichepop::env::{builtin_environment, sample_regime};
use nichepop::metrics::effective_regime_count;
use nichepop::rng::RngStream;

fn main() -> nichepop::error::Result<()> {
    for name in ["crypto4", "traffic6", "mono1"] {
        let env = builtin_environment(name)?;
        let mut process = env.process.clone();
        let mut rng = RngStream::new(7);
        process.start(&mut rng);
        let n = 100_000;
        let mut counts = vec![0usize; env.n_regimes()];
        for _ in 0..n {
            counts[sample_regime(&mut process, &mut rng).0] += 1;
        }
        println!(
            "{name} ({:?}), k_eff = {:.3}",
            process.kind,
            effective_regime_count(&process.stationary)?
        );
        for (r, c) in counts.iter().enumerate() {
            println!(
                "  {:<14} declared {:.3}  observed {:.3}",
                env.affinity.regime_names()[r],
                process.stationary[r],
                *c as f64 / n as f64
            );
        }
    }
    Ok(())
}
