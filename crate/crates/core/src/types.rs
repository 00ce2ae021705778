//! Domain types shared by the environment, the engines and the metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that a vector lies on the probability simplex.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Index of a regime in `[0, R)`.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct RegimeId(pub usize);

/// Index of a method in `[0, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethodId(pub usize);

impl RegimeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl MethodId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Checks that `p` is non-empty, non-negative and sums to one within [`SIMPLEX_TOL`].
pub fn check_simplex(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::NotSimplex("empty vector".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::NotSimplex(format!(
            "entry {x} is negative or non-finite"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::NotSimplex(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Ground-truth performance of every method in every regime, stored regime-major
/// (`values[r][m]`).
///
/// Rows are not required to peak at 1.0; matrices are kept exactly as given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AffinityMatrixData")]
pub struct AffinityMatrix {
    values: Vec<Vec<f64>>,
    regime_names: Vec<String>,
    method_names: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffinityMatrixData {
    values: Vec<Vec<f64>>,
    #[serde(default)]
    regime_names: Option<Vec<String>>,
    #[serde(default)]
    method_names: Option<Vec<String>>,
}

impl TryFrom<AffinityMatrixData> for AffinityMatrix {
    type Error = Error;

    fn try_from(d: AffinityMatrixData) -> Result<Self> {
        let r = d.values.len();
        let m = d.values.first().map_or(0, Vec::len);
        AffinityMatrix::new(
            d.values,
            d.regime_names
                .unwrap_or_else(|| (0..r).map(|i| format!("r{i}")).collect()),
            d.method_names
                .unwrap_or_else(|| (0..m).map(|i| format!("m{i}")).collect()),
        )
    }
}

impl AffinityMatrix {
    pub fn new(
        values: Vec<Vec<f64>>,
        regime_names: Vec<String>,
        method_names: Vec<String>,
    ) -> Result<Self> {
        let r = values.len();
        if r == 0 {
            return Err(Error::Dimension(
                "affinity matrix needs at least one regime".into(),
            ));
        }
        let m = values[0].len();
        if m == 0 {
            return Err(Error::Dimension(
                "affinity matrix needs at least one method".into(),
            ));
        }
        if values.iter().any(|row| row.len() != m) {
            return Err(Error::Dimension("ragged affinity matrix".into()));
        }
        if regime_names.len() != r || method_names.len() != m {
            return Err(Error::Dimension(format!(
                "{} regime names and {} method names for a {r}x{m} matrix",
                regime_names.len(),
                method_names.len()
            )));
        }
        for (ri, row) in values.iter().enumerate() {
            for (mi, a) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(a) {
                    return Err(Error::InvalidValue(format!(
                        "affinity A({ri},{mi}) = {a} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self {
            values,
            regime_names,
            method_names,
        })
    }

    /// Builds a matrix with generated labels `r0..`, `m0..`.
    pub fn unlabeled(values: Vec<Vec<f64>>) -> Result<Self> {
        AffinityMatrixData {
            values,
            regime_names: None,
            method_names: None,
        }
        .try_into()
    }

    pub fn n_regimes(&self) -> usize {
        self.values.len()
    }

    pub fn n_methods(&self) -> usize {
        self.values[0].len()
    }

    pub fn get(&self, r: RegimeId, m: MethodId) -> f64 {
        self.values[r.0][m.0]
    }

    pub fn row(&self, r: RegimeId) -> &[f64] {
        &self.values[r.0]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn regime_names(&self) -> &[String] {
        &self.regime_names
    }

    pub fn method_names(&self) -> &[String] {
        &self.method_names
    }

    pub fn regime_index(&self, name: &str) -> Option<RegimeId> {
        self.regime_names
            .iter()
            .position(|n| n == name)
            .map(RegimeId)
    }

    pub fn method_index(&self, name: &str) -> Option<MethodId> {
        self.method_names
            .iter()
            .position(|n| n == name)
            .map(MethodId)
    }

    /// Keeps only the listed regimes, in the given order.
    pub fn restrict_regimes(&self, keep: &[RegimeId]) -> Result<Self> {
        Self::new(
            keep.iter().map(|r| self.values[r.0].clone()).collect(),
            keep.iter()
                .map(|r| self.regime_names[r.0].clone())
                .collect(),
            self.method_names.clone(),
        )
    }
}

/// An agent's distribution over regimes. Its argmax is the agent's primary niche.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NicheAffinity {
    probs: Vec<f64>,
}

impl NicheAffinity {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_simplex(&probs)?;
        Ok(Self { probs })
    }

    pub fn uniform(n_regimes: usize) -> Self {
        Self {
            probs: vec![1.0 / n_regimes as f64; n_regimes],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, r: RegimeId) -> f64 {
        self.probs[r.0]
    }

    pub fn n_regimes(&self) -> usize {
        self.probs.len()
    }

    /// Primary niche; ties go to the lowest regime index.
    pub fn primary(&self) -> RegimeId {
        RegimeId(argmax_lowest(&self.probs))
    }

    pub(crate) fn probs_mut(&mut self) -> &mut Vec<f64> {
        &mut self.probs
    }
}

/// Beta(success, failure) belief about a method's quality in one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaBelief {
    pub success: f64,
    pub failure: f64,
}

impl BetaBelief {
    pub const UNIFORM: BetaBelief = BetaBelief {
        success: 1.0,
        failure: 1.0,
    };

    pub fn new(success: f64, failure: f64) -> Result<Self> {
        if !(success > 0.0 && failure > 0.0 && success.is_finite() && failure.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "Beta parameters must be positive and finite, got ({success}, {failure})"
            )));
        }
        Ok(Self { success, failure })
    }

    pub fn mean(&self) -> f64 {
        self.success / (self.success + self.failure)
    }
}

impl Default for BetaBelief {
    fn default() -> Self {
        Self::UNIFORM
    }
}

/// One learner: per-(regime, method) beliefs, niche affinity and method usage
/// counts accumulated during the measurement window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub beliefs: Vec<Vec<BetaBelief>>,
    pub affinity: NicheAffinity,
    pub method_usage_counts: Vec<u64>,
}

impl AgentState {
    /// Blank-slate learner: Beta(1,1) everywhere and uniform affinity.
    pub fn blank(n_regimes: usize, n_methods: usize) -> Self {
        Self {
            beliefs: vec![vec![BetaBelief::UNIFORM; n_methods]; n_regimes],
            affinity: NicheAffinity::uniform(n_regimes),
            method_usage_counts: vec![0; n_methods],
        }
    }

    pub fn n_regimes(&self) -> usize {
        self.beliefs.len()
    }

    pub fn n_methods(&self) -> usize {
        self.method_usage_counts.len()
    }

    pub fn belief(&self, r: RegimeId, m: MethodId) -> BetaBelief {
        self.beliefs[r.0][m.0]
    }
}

/// Population-level metrics computed from final agent states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub si_per_agent: Vec<f64>,
    pub mean_si: f64,
    pub msi_per_agent: Vec<f64>,
    pub coverage: f64,
    pub distinct_primary_niches: usize,
    pub effective_si: f64,
}

impl MetricSummary {
    pub fn mean_msi(&self) -> f64 {
        if self.msi_per_agent.is_empty() {
            return 0.0;
        }
        self.msi_per_agent.iter().sum::<f64>() / self.msi_per_agent.len() as f64
    }
}
