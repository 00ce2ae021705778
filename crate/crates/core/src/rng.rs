//! Seeded random streams.
//!
//! Everything random in a trial comes from ChaCha8 streams derived from a single
//! 64-bit seed, so a trial is reproducible on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    /// Independent stream `stream` under the same seed.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }

    /// Beta(a, b) as `X / (X + Y)` with `X ~ Gamma(a, 1)`, `Y ~ Gamma(b, 1)`.
    pub fn beta(&mut self, a: f64, b: f64) -> f64 {
        let x = Gamma::new(a, 1.0)
            .expect("positive shape")
            .sample(&mut self.inner);
        let y = Gamma::new(b, 1.0)
            .expect("positive shape")
            .sample(&mut self.inner);
        if x + y == 0.0 {
            // Both gammas underflowed; only possible for tiny shapes.
            return a / (a + b);
        }
        x / (x + y)
    }

    /// Draws an index from a discrete distribution by inverse CDF.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // Rounding left u above the final partial sum: take the last non-zero entry.
        probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }
}
