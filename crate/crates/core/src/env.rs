//! Synthetic regime-switching environments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::{check_simplex, AffinityMatrix, MethodId, RegimeId};

/// Reward noise used by the built-in environments.
pub const DEFAULT_NOISE_SIGMA: f64 = 0.15;

/// Tolerance on `pi P = pi` for Markov processes.
pub const STATIONARITY_TOL: f64 = 1e-6;

/// Names accepted by [`builtin_environment`].
pub const BUILTIN_NAMES: [&str; 4] = ["crypto4", "generic4", "traffic6", "mono1"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Iid,
    Markov,
}

/// How regimes are drawn from one iteration to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeProcess {
    pub kind: ProcessKind,
    pub stationary: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<f64>>>,
    /// Chain state; reset by [`RegimeProcess::start`], never persisted.
    #[serde(skip)]
    pub current: RegimeId,
}

impl RegimeProcess {
    pub fn iid(stationary: Vec<f64>) -> Result<Self> {
        let p = Self {
            kind: ProcessKind::Iid,
            stationary,
            transition: None,
            current: RegimeId(0),
        };
        p.validate()?;
        Ok(p)
    }

    /// Markov chain over `transition`. When `stationary` is `None` it is solved
    /// for by power iteration; either way it is checked against `pi P = pi`.
    pub fn markov(transition: Vec<Vec<f64>>, stationary: Option<Vec<f64>>) -> Result<Self> {
        for row in &transition {
            check_simplex(row)?;
        }
        let stationary = match stationary {
            Some(s) => s,
            None => solve_stationary(&transition)?,
        };
        let p = Self {
            kind: ProcessKind::Markov,
            stationary,
            transition: Some(transition),
            current: RegimeId(0),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n_regimes(&self) -> usize {
        self.stationary.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_simplex(&self.stationary)?;
        let r = self.stationary.len();
        if self.current.0 >= r {
            return Err(Error::Dimension(format!(
                "current regime {} out of range for R = {r}",
                self.current.0
            )));
        }
        match (self.kind, &self.transition) {
            (ProcessKind::Iid, _) => Ok(()),
            (ProcessKind::Markov, None) => Err(Error::InvalidValue(
                "Markov process without a transition matrix".into(),
            )),
            (ProcessKind::Markov, Some(t)) => {
                if t.len() != r || t.iter().any(|row| row.len() != r) {
                    return Err(Error::Dimension(format!(
                        "transition matrix is not {r}x{r}"
                    )));
                }
                for row in t {
                    check_simplex(row)?;
                }
                let residual = stationarity_residual(t, &self.stationary);
                if residual > STATIONARITY_TOL {
                    return Err(Error::InvalidValue(format!(
                        "declared stationary vector violates pi P = pi by {residual:e}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Puts the chain in a starting state drawn from the stationary vector.
    /// No-op for IID processes.
    pub fn start(&mut self, rng: &mut RngStream) {
        if self.kind == ProcessKind::Markov {
            self.current = RegimeId(rng.categorical(&self.stationary));
        }
    }
}

fn stationarity_residual(t: &[Vec<f64>], pi: &[f64]) -> f64 {
    (0..pi.len())
        .map(|j| {
            let next: f64 = (0..pi.len()).map(|i| pi[i] * t[i][j]).sum();
            (next - pi[j]).abs()
        })
        .fold(0.0, f64::max)
}

fn solve_stationary(t: &[Vec<f64>]) -> Result<Vec<f64>> {
    let r = t.len();
    if r == 0 {
        return Err(Error::Dimension("empty transition matrix".into()));
    }
    let mut pi = vec![1.0 / r as f64; r];
    for _ in 0..100_000 {
        // Lazy chain (P + I) / 2 has the same stationary vector and no periodicity.
        let next: Vec<f64> = (0..r)
            .map(|j| 0.5 * pi[j] + 0.5 * (0..r).map(|i| pi[i] * t[i][j]).sum::<f64>())
            .collect();
        let delta = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if delta < 1e-15 {
            break;
        }
    }
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= s);
    Ok(pi)
}

/// Draws the next regime. IID processes sample the stationary vector; Markov
/// processes step from `current` and remember the result.
pub fn sample_regime(process: &mut RegimeProcess, rng: &mut RngStream) -> RegimeId {
    match (process.kind, &process.transition) {
        (ProcessKind::Markov, Some(t)) => {
            let next = RegimeId(rng.categorical(&t[process.current.0]));
            process.current = next;
            next
        }
        _ => RegimeId(rng.categorical(&process.stationary)),
    }
}

/// An environment: ground-truth affinities, a regime process and reward noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    pub name: String,
    pub affinity: AffinityMatrix,
    pub process: RegimeProcess,
    #[serde(default = "default_noise_sigma")]
    pub noise_sigma: f64,
}

fn default_noise_sigma() -> f64 {
    DEFAULT_NOISE_SIGMA
}

impl EnvironmentSpec {
    pub fn new(
        name: impl Into<String>,
        affinity: AffinityMatrix,
        process: RegimeProcess,
        noise_sigma: f64,
    ) -> Result<Self> {
        let env = Self {
            name: name.into(),
            affinity,
            process,
            noise_sigma,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        self.process.validate()?;
        if self.process.n_regimes() != self.affinity.n_regimes() {
            return Err(Error::Dimension(format!(
                "process has {} regimes, affinity matrix has {}",
                self.process.n_regimes(),
                self.affinity.n_regimes()
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "noise_sigma = {} must be finite and >= 0",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    pub fn n_regimes(&self) -> usize {
        self.affinity.n_regimes()
    }

    pub fn n_methods(&self) -> usize {
        self.affinity.n_methods()
    }

    /// Stationary-weighted mean affinity of every method.
    pub fn expected_affinity(&self) -> Vec<f64> {
        (0..self.n_methods())
            .map(|m| {
                self.process
                    .stationary
                    .iter()
                    .enumerate()
                    .map(|(r, p)| p * self.affinity.get(RegimeId(r), MethodId(m)))
                    .sum()
            })
            .collect()
    }
}

/// `A(r, m) + N(0, noise_sigma^2)`. Not clamped.
pub fn realize_reward(env: &EnvironmentSpec, r: RegimeId, m: MethodId, rng: &mut RngStream) -> f64 {
    let base = env.affinity.get(r, m);
    if env.noise_sigma == 0.0 {
        return base;
    }
    rng.normal(base, env.noise_sigma)
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn crypto_matrix() -> AffinityMatrix {
    // Rows are regimes here; the usual presentation has methods as rows.
    AffinityMatrix::new(
        vec![
            vec![0.50, 0.80, 0.90, 0.30, 0.85],
            vec![0.30, 0.70, 0.80, 0.40, 0.75],
            vec![0.60, 0.40, 0.30, 0.90, 0.35],
            vec![0.40, 0.60, 0.50, 0.70, 0.50],
        ],
        names(&["Bull", "Bear", "Sideways", "Volatile"]),
        names(&[
            "Naive",
            "Momentum-Short",
            "Momentum-Long",
            "Mean-Revert",
            "Trend",
        ]),
    )
    .expect("static matrix is valid")
}

/// Built-in presets: `crypto4`, `generic4`, `traffic6`, `mono1`.
pub fn builtin_environment(name: &str) -> Result<EnvironmentSpec> {
    match name {
        "crypto4" => {
            let rest = 0.7 / 3.0;
            EnvironmentSpec::new(
                name,
                crypto_matrix(),
                RegimeProcess::iid(vec![0.30, rest, rest, rest])?,
                DEFAULT_NOISE_SIGMA,
            )
        }
        "generic4" => {
            // One 0.9 specialist per regime plus a 0.6 all-rounder.
            let affinity = AffinityMatrix::new(
                vec![
                    vec![0.90, 0.50, 0.30, 0.40, 0.60],
                    vec![0.40, 0.90, 0.50, 0.30, 0.60],
                    vec![0.30, 0.40, 0.90, 0.50, 0.60],
                    vec![0.50, 0.30, 0.40, 0.90, 0.60],
                ],
                names(&["r0", "r1", "r2", "r3"]),
                names(&["m0", "m1", "m2", "m3", "m4"]),
            )?;
            EnvironmentSpec::new(
                name,
                affinity,
                RegimeProcess::iid(vec![0.25; 4])?,
                DEFAULT_NOISE_SIGMA,
            )
        }
        "traffic6" => {
            let affinity = AffinityMatrix::new(
                vec![
                    vec![0.90, 0.60, 0.50, 0.30, 0.70],
                    vec![0.40, 0.50, 0.60, 0.90, 0.50],
                    vec![0.50, 0.90, 0.60, 0.40, 0.70],
                    vec![0.30, 0.50, 0.60, 0.85, 0.40],
                    vec![0.60, 0.70, 0.50, 0.40, 0.90],
                    vec![0.50, 0.40, 0.90, 0.30, 0.60],
                ],
                names(&[
                    "night",
                    "morning_rush",
                    "midday",
                    "evening_rush",
                    "evening",
                    "weekend",
                ]),
                names(&[
                    "Persistence",
                    "Hourly-Avg",
                    "Weekly-Pattern",
                    "Rush-Hour",
                    "Exp-Smooth",
                ]),
            )?;
            let r = 6;
            let transition = (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| {
                            if j == i {
                                0.6
                            } else if j == (i + 1) % r {
                                0.3
                            } else {
                                0.1 / (r - 2) as f64
                            }
                        })
                        .collect()
                })
                .collect();
            EnvironmentSpec::new(
                name,
                affinity,
                RegimeProcess::markov(transition, None)?,
                DEFAULT_NOISE_SIGMA,
            )
        }
        "mono1" => {
            // Full crypto regime set, but only Bull ever occurs.
            EnvironmentSpec::new(
                name,
                crypto_matrix(),
                RegimeProcess::iid(vec![1.0, 0.0, 0.0, 0.0])?,
                DEFAULT_NOISE_SIGMA,
            )
        }
        other => Err(Error::UnknownEnvironment(other.to_string())),
    }
}
