//! Executable checks of the three theoretical results: crowding deviations,
//! the SI lower bound, and collapse in single-regime environments.

use serde::{Deserialize, Serialize};

use crate::analysis::stats::mean;
use crate::error::{Error, Result};
use crate::types::MetricSummary;

/// Slack on the SI lower bound for 30-trial means.
pub const PROP2_DEFAULT_MARGIN: f64 = 0.02;
/// Effective SI must stay below this in a single-regime environment.
pub const PROP3_SI_THRESHOLD: f64 = 0.10;
/// Fraction of trials that must end with every agent in the same niche.
pub const PROP3_SINGLE_NICHE_FRACTION: f64 = 0.90;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub from: usize,
    pub to: usize,
    pub payoff_before: f64,
    pub payoff_after: f64,
}

impl Deviation {
    pub fn gain(&self) -> f64 {
        self.payoff_after - self.payoff_before
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub n_agents: usize,
    pub n_regimes: usize,
    pub occupancy: Vec<usize>,
    /// `V_r / k_r` for occupied niches.
    pub payoffs: Vec<Option<f64>>,
    pub crowded: Vec<usize>,
    pub deviation: Option<Deviation>,
}

impl DeviationReport {
    /// `N > R` forces some niche to hold two or more agents.
    pub fn pigeonhole(&self) -> bool {
        self.n_agents > self.n_regimes
    }
}

/// Crowding payoff model with zero competition cost: an agent in niche `r`
/// earns `V_r / k_r`; moving to `r'` earns `V_r' / (k_r' + 1)`.
///
/// For each crowded niche (`k_r >= 2`) the candidate move is to the least
/// occupied other niche (lowest index on ties). Reports the candidate with the
/// largest strict gain, if any.
pub fn prop1_deviation_check(values: &[f64], occupancy: &[usize]) -> Result<DeviationReport> {
    if values.len() != occupancy.len() || values.is_empty() {
        return Err(Error::Dimension(format!(
            "{} niche values for {} occupancy counts",
            values.len(),
            occupancy.len()
        )));
    }
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidValue("niche values must be positive".into()));
    }
    let r = values.len();
    let payoffs = values
        .iter()
        .zip(occupancy)
        .map(|(v, k)| (*k > 0).then(|| v / *k as f64))
        .collect();
    let crowded: Vec<usize> = (0..r).filter(|i| occupancy[*i] >= 2).collect();

    let mut best: Option<Deviation> = None;
    for &from in &crowded {
        let Some(to) = (0..r).filter(|i| *i != from).min_by_key(|i| occupancy[*i]) else {
            continue;
        };
        let candidate = Deviation {
            from,
            to,
            payoff_before: values[from] / occupancy[from] as f64,
            payoff_after: values[to] / (occupancy[to] + 1) as f64,
        };
        if candidate.gain() > 0.0 && best.as_ref().is_none_or(|b| candidate.gain() > b.gain()) {
            best = Some(candidate);
        }
    }

    Ok(DeviationReport {
        n_agents: occupancy.iter().sum(),
        n_regimes: r,
        occupancy: occupancy.to_vec(),
        payoffs,
        crowded,
        deviation: best,
    })
}

/// `lambda/(1+lambda) * (1 - 1/R) * (1 - exp(-eta T / R))`.
pub fn prop2_bound(lambda: f64, eta: f64, iterations: usize, n_regimes: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidValue(format!(
            "the bound needs lambda > 0, got {lambda}"
        )));
    }
    if n_regimes < 2 {
        return Err(Error::SingleCategory);
    }
    let r = n_regimes as f64;
    Ok(lambda / (1.0 + lambda) * (1.0 - 1.0 / r) * (1.0 - (-eta * iterations as f64 / r).exp()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lambda: f64,
    pub eta: f64,
    #[serde(rename = "T")]
    pub iterations: usize,
    #[serde(rename = "R")]
    pub n_regimes: usize,
    pub predicted_lower_bound: f64,
    pub observed_mean_si: f64,
    pub satisfied: bool,
    pub margin: f64,
}

pub fn prop2_bound_check(
    lambda: f64,
    eta: f64,
    iterations: usize,
    n_regimes: usize,
    observed: &[f64],
    margin: f64,
) -> Result<BoundCheck> {
    if observed.is_empty() {
        return Err(Error::DegenerateSample("no observed SI values".into()));
    }
    let predicted = prop2_bound(lambda, eta, iterations, n_regimes)?;
    let observed_mean_si = mean(observed);
    Ok(BoundCheck {
        lambda,
        eta,
        iterations,
        n_regimes,
        predicted_lower_bound: predicted,
        observed_mean_si,
        satisfied: observed_mean_si >= predicted - margin,
        margin,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub n_trials: usize,
    pub mean_effective_si: f64,
    pub mean_si: f64,
    pub single_niche_fraction: f64,
    pub passed: bool,
}

/// Summaries from a single-regime environment should show no population-level
/// specialization: low effective SI and one shared niche in nearly every trial.
pub fn prop3_collapse_check(summaries: &[MetricSummary]) -> Result<CollapseReport> {
    if summaries.is_empty() {
        return Err(Error::DegenerateSample("no trial summaries".into()));
    }
    let n = summaries.len() as f64;
    let mean_effective_si = summaries.iter().map(|s| s.effective_si).sum::<f64>() / n;
    let mean_si = summaries.iter().map(|s| s.mean_si).sum::<f64>() / n;
    let single_niche_fraction = summaries
        .iter()
        .filter(|s| s.distinct_primary_niches == 1)
        .count() as f64
        / n;
    Ok(CollapseReport {
        n_trials: summaries.len(),
        mean_effective_si,
        mean_si,
        single_niche_fraction,
        passed: mean_effective_si < PROP3_SI_THRESHOLD
            && single_niche_fraction >= PROP3_SINGLE_NICHE_FRACTION,
    })
}

/// Every way to place `n` agents into `r` niches, in lexicographic order.
pub fn compositions(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(left - k, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r > 0 {
        rec(n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn crowded_niche_deviates_to_singleton() {
        let rep = prop1_deviation_check(&[1.0; 4], &[5, 1, 1, 1]).unwrap();
        let d = rep.deviation.as_ref().unwrap();
        assert_eq!((d.from, d.to), (0, 1));
        assert!((d.payoff_before - 0.2).abs() < 1e-12);
        assert!((d.payoff_after - 0.5).abs() < 1e-12);
        assert!(rep.pigeonhole());
    }

    #[test]
    fn balanced_occupancy_is_stable() {
        let rep = prop1_deviation_check(&[1.0; 4], &[2, 2, 2, 2]).unwrap();
        assert!(rep.payoffs.iter().all(|p| *p == Some(0.5)));
        assert!(rep.deviation.is_none());
        assert_eq!(rep.crowded, vec![0, 1, 2, 3]);
    }

    #[test]
    fn sparse_occupancy_has_no_crowding() {
        let rep = prop1_deviation_check(&[1.0; 4], &[1, 1, 0, 0]).unwrap();
        assert!(rep.crowded.is_empty());
        assert!(rep.deviation.is_none());
        assert!(!rep.pigeonhole());
        assert_eq!(rep.payoffs[2], None);
    }

    #[test]
    fn prop1_input_checks() {
        assert!(prop1_deviation_check(&[1.0, 1.0], &[1]).is_err());
        assert!(prop1_deviation_check(&[1.0, 0.0], &[1, 1]).is_err());
    }

    #[test]
    fn bound_values() {
        // T -> infinity: 0.3/1.3 * 3/4 = 0.17307692...
        let inf = prop2_bound(0.3, 0.1, 1_000_000, 4).unwrap();
        assert!((inf - 0.173).abs() < 5e-4);
        let finite = prop2_bound(0.3, 0.1, 500, 4).unwrap();
        assert!((finite - 0.17307627807925868).abs() < 1e-12);
        assert!(prop2_bound(1e-9, 0.1, 500, 4).unwrap() < 1e-8);
        assert!(prop2_bound(0.0, 0.1, 500, 4).is_err());
        assert!(prop2_bound(0.3, 0.1, 500, 1).is_err());
    }

    #[test]
    fn bound_check_margin() {
        let c = prop2_bound_check(0.3, 0.1, 500, 4, &[0.16, 0.16], 0.02).unwrap();
        assert!(c.satisfied);
        let c = prop2_bound_check(0.3, 0.1, 500, 4, &[0.14], 0.02).unwrap();
        assert!(!c.satisfied);
    }

    fn summary(si: f64, distinct: usize) -> MetricSummary {
        MetricSummary {
            si_per_agent: vec![si; 8],
            mean_si: si,
            msi_per_agent: vec![0.0; 8],
            coverage: 0.0,
            distinct_primary_niches: distinct,
            effective_si: si * distinct as f64 / 4.0,
        }
    }

    #[test]
    fn collapse_examples() {
        // All agents one-hot on one regime: effective SI = 1 * 1/min(N, R).
        let rep = prop3_collapse_check(&[summary(1.0, 1)]).unwrap();
        assert_eq!(rep.mean_effective_si, 0.25);
        assert!(!rep.passed);
        let rep = prop3_collapse_check(&vec![summary(0.0, 1); 30]).unwrap();
        assert_eq!(rep.mean_effective_si, 0.0);
        assert!(rep.passed);
        assert!(prop3_collapse_check(&[]).is_err());
    }

    #[test]
    fn composition_count() {
        // C(8 + 3, 3) = 165.
        assert_eq!(compositions(8, 4).len(), 165);
        assert!(compositions(8, 4)
            .iter()
            .all(|c| c.iter().sum::<usize>() == 8));
    }

    proptest! {
        #[test]
        fn bound_monotone(l in 0.01f64..2.0, dl in 0.01f64..1.0, eta in 0.01f64..1.0,
                          t in 1usize..1000, r in 2usize..10) {
            let b = prop2_bound(l, eta, t, r).unwrap();
            prop_assert!(prop2_bound(l + dl, eta, t, r).unwrap() >= b);
            prop_assert!(prop2_bound(l, eta, t + 10, r).unwrap() >= b);
            prop_assert!(prop2_bound(l, (eta * 1.5).min(1.0), t, r).unwrap() >= b);
        }

        #[test]
        fn bound_monotone_in_regimes_at_fixed_exponent(l in 0.01f64..2.0, k in 1usize..20, r in 2usize..10) {
            // eta = 1 and T = k R keep eta T / R = k fixed.
            let a = prop2_bound(l, 1.0, k * r, r).unwrap();
            let b = prop2_bound(l, 1.0, k * (r + 1), r + 1).unwrap();
            prop_assert!(b >= a);
        }
    }
}
