//! Effect sizes, Welch's t-test, percentile bootstrap and Bonferroni.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const BOOTSTRAP_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub mean_a: f64,
    pub mean_b: f64,
    pub cohens_d: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub bonferroni_alpha: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

fn check_samples(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::DegenerateSample(format!(
            "need at least 2 points per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::DegenerateSample("non-finite observation".into()));
    }
    Ok(())
}

/// `(mean_a - mean_b) / pooled_sd`.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let pooled = (((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0)).sqrt();
    let diff = mean(a) - mean(b);
    if pooled == 0.0 {
        return if diff == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::InfiniteEffect)
        };
    }
    Ok(diff / pooled)
}

/// Two-sided tail probability of Student's t with `df` degrees of freedom.
/// Uses the regularized incomplete beta so tiny p-values keep their precision.
fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Welch's unequal-variance t statistic, degrees of freedom and two-sided p.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<(f64, f64, f64)> {
    check_samples(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    let diff = mean(a) - mean(b);
    let se2 = va + vb;
    if se2 == 0.0 {
        let df = na + nb - 2.0;
        return Ok(if diff == 0.0 {
            (0.0, df, 1.0)
        } else {
            (diff.signum() * f64::INFINITY, df, 0.0)
        });
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok((t, df, t_two_sided_p(t, df)))
}

/// Percentile bootstrap CI of the mean at the given confidence level.
pub fn bootstrap_mean_ci(
    xs: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    if xs.is_empty() || resamples == 0 {
        return Err(Error::DegenerateSample("empty bootstrap input".into()));
    }
    let mut rng = RngStream::new(seed);
    let n = xs.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| xs[rng.index(n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let pick = |q: f64| {
        let idx = (q * (resamples - 1) as f64).round() as usize;
        means[idx.min(resamples - 1)]
    };
    let m = mean(xs);
    // Percentile bounds can miss the sample mean for very skewed tiny samples.
    Ok((pick(tail).min(m), pick(1.0 - tail).max(m)))
}

pub fn bonferroni_threshold(alpha: f64, k: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidValue(format!(
            "alpha = {alpha} outside (0, 1)"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidValue("k must be >= 1".into()));
    }
    Ok(alpha / k as f64)
}

/// Welch test of `a` against `b`, with Cohen's d, a bootstrap CI of `mean_a`
/// and the Bonferroni threshold for `comparisons` tests at `alpha`.
pub fn compare_samples(a: &[f64], b: &[f64], alpha: f64, comparisons: usize) -> Result<StatResult> {
    let (t, _, p) = welch_t(a, b)?;
    let d = match cohens_d(a, b) {
        Ok(d) => d,
        Err(Error::InfiniteEffect) => (mean(a) - mean(b)).signum() * f64::INFINITY,
        Err(e) => return Err(e),
    };
    let (ci_low, ci_high) = bootstrap_mean_ci(a, BOOTSTRAP_RESAMPLES, 0.95, BOOTSTRAP_SEED)?;
    Ok(StatResult {
        mean_a: mean(a),
        mean_b: mean(b),
        cohens_d: d,
        t_statistic: t,
        p_value: p,
        ci_low,
        ci_high,
        n_a: a.len(),
        n_b: b.len(),
        bonferroni_alpha: bonferroni_threshold(alpha, comparisons)?,
    })
}

/// [`compare_samples`] at `alpha = 0.05` for a single comparison.
pub fn two_sample_t_test(a: &[f64], b: &[f64]) -> Result<StatResult> {
    compare_samples(a, b, 0.05, 1)
}
