//! Entropy-based specialization metrics.
//!
//! All logarithms are natural. Metric outputs in `[0, 1]` are clamped to absorb
//! rounding.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::types::{check_simplex, AgentState, MetricSummary, NicheAffinity};

/// Coverage threshold on a method's usage share.
pub const DEFAULT_TAU: f64 = 0.3;

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_simplex(p)?;
    Ok(entropy_unchecked(p))
}

fn entropy_unchecked(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|x| **x > 0.0).map(|x| -x * x.ln()).sum();
    h.clamp(0.0, (p.len() as f64).ln())
}

fn normalized_concentration(p: &[f64]) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::SingleCategory);
    }
    let h = shannon_entropy(p)?;
    Ok((1.0 - h / (p.len() as f64).ln()).clamp(0.0, 1.0))
}

/// `1 - H(alpha) / ln R`: 0 for a generalist, 1 for a one-regime specialist.
pub fn specialization_index(alpha: &NicheAffinity) -> Result<f64> {
    normalized_concentration(alpha.probs())
}

fn usage_distribution(counts: &[u64]) -> Result<Vec<f64>> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::NoSelections);
    }
    Ok(counts.iter().map(|c| *c as f64 / total as f64).collect())
}

/// Same construction as [`specialization_index`] over a method-usage histogram.
pub fn method_specialization_index(usage_counts: &[u64]) -> Result<f64> {
    if usage_counts.len() < 2 {
        return Err(Error::SingleCategory);
    }
    normalized_concentration(&usage_distribution(usage_counts)?)
}

/// Fraction of methods whose usage share exceeds `tau` for at least one agent.
pub fn method_coverage(all_usage: &[Vec<u64>], tau: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::InvalidValue(format!("tau = {tau} outside [0, 1)")));
    }
    let Some(first) = all_usage.first() else {
        return Err(Error::NoSelections);
    };
    let m = first.len();
    let mut covered = vec![false; m];
    for counts in all_usage {
        if counts.len() != m {
            return Err(Error::Dimension("agents disagree on method count".into()));
        }
        let share = usage_distribution(counts)?;
        for (c, s) in covered.iter_mut().zip(&share) {
            *c |= *s > tau;
        }
    }
    Ok(covered.iter().filter(|c| **c).count() as f64 / m as f64)
}

/// `exp(H(pi))`, the number of equiprobable regimes with the same entropy.
pub fn effective_regime_count(pi: &[f64]) -> Result<f64> {
    Ok(shannon_entropy(pi)?.exp())
}

/// Per-agent and population metrics.
///
/// Agents without any recorded selections get MSI 0 and are left out of the
/// coverage count. `effective_si` scales the mean SI by the fraction of niches
/// actually partitioned: `mean_si * distinct / min(N, R)`.
pub fn population_summary(agents: &[AgentState], tau: f64) -> Result<MetricSummary> {
    let first = agents
        .first()
        .ok_or_else(|| Error::Dimension("empty population".into()))?;
    let (r, m) = (first.n_regimes(), first.n_methods());
    if agents
        .iter()
        .any(|a| a.n_regimes() != r || a.n_methods() != m)
    {
        return Err(Error::Dimension("agents disagree on R or M".into()));
    }

    let si_per_agent = agents
        .iter()
        .map(|a| specialization_index(&a.affinity))
        .collect::<Result<Vec<_>>>()?;
    let mean_si = si_per_agent.iter().sum::<f64>() / agents.len() as f64;

    let msi_per_agent = agents
        .iter()
        .map(
            |a| match method_specialization_index(&a.method_usage_counts) {
                Err(Error::NoSelections) => Ok(0.0),
                other => other,
            },
        )
        .collect::<Result<Vec<_>>>()?;

    let active: Vec<Vec<u64>> = agents
        .iter()
        .filter(|a| a.method_usage_counts.iter().any(|c| *c > 0))
        .map(|a| a.method_usage_counts.clone())
        .collect();
    let coverage = if active.is_empty() {
        0.0
    } else {
        method_coverage(&active, tau)?
    };

    let distinct_primary_niches = agents
        .iter()
        .map(|a| a.affinity.primary())
        .collect::<BTreeSet<_>>()
        .len();
    let effective_si =
        (mean_si * distinct_primary_niches as f64 / agents.len().min(r) as f64).clamp(0.0, 1.0);

    Ok(MetricSummary {
        si_per_agent,
        mean_si,
        msi_per_agent,
        coverage,
        distinct_primary_niches,
        effective_si,
    })
}
