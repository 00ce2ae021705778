//! The competitive population engine and its two baselines.
//!
//! Every iteration: draw a regime, let every agent pick a method, realize
//! rewards, score them, and update only the single highest-scoring agent.
//! Losers are frozen for that iteration.

use serde::{Deserialize, Serialize};

use crate::env::{realize_reward, sample_regime, EnvironmentSpec, RegimeProcess};
use crate::error::{Error, Result};
use crate::metrics::{population_summary, DEFAULT_TAU};
use crate::rng::RngStream;
use crate::types::{argmax_lowest, AgentState, MethodId, MetricSummary, RegimeId};

/// Lower bound for a Beta parameter when reward clamping is switched off.
const MIN_BETA_PARAM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BonusMode {
    /// `raw * (1 + lambda * alpha_r)`, only when `r` is the agent's primary niche.
    Multiplicative,
    /// `raw + lambda * (alpha_r - 1/R)`, always.
    CenteredAdditive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefUpdate {
    /// Add the (clamped) winning score to the success count.
    RewardWeighted,
    /// Add one to the success count.
    Unit,
}

/// Whether agents that play the same method in the same iteration see the same
/// noise draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSharing {
    /// Each agent gets its own draw.
    PerAgent,
    /// One draw per method per iteration, shared by everyone who played it.
    PerMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub n_agents: usize,
    pub lambda: f64,
    pub eta: f64,
    pub iterations: usize,
    pub bonus_mode: BonusMode,
    pub belief_update: BeliefUpdate,
    pub affinity_floor: f64,
    pub reward_clamp_at_zero: bool,
    pub noise_sharing: NoiseSharing,
    pub usage_counting: UsageCounting,
}

/// Which plays count toward an agent's method-usage histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UsageCounting {
    Selections,
    Wins,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            n_agents: 8,
            lambda: 0.3,
            eta: 0.1,
            iterations: 500,
            bonus_mode: BonusMode::Multiplicative,
            belief_update: BeliefUpdate::RewardWeighted,
            affinity_floor: 0.01,
            reward_clamp_at_zero: true,
            noise_sharing: NoiseSharing::PerAgent,
            usage_counting: UsageCounting::Selections,
        }
    }
}

impl EngineConfig {
    /// Checks the config on its own and against an environment's regime count.
    pub fn validate(&self, n_regimes: usize) -> Result<()> {
        if self.n_agents < 1 {
            return Err(Error::config("engine.n_agents", "must be >= 1"));
        }
        if self.iterations < 1 {
            return Err(Error::config("engine.iterations", "must be >= 1"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("engine.lambda", "must be finite and >= 0"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::config("engine.eta", "must lie in (0, 1]"));
        }
        if !(self.affinity_floor >= 0.0 && self.affinity_floor * (n_regimes as f64) < 1.0) {
            return Err(Error::config(
                "engine.affinity_floor",
                format!("must be >= 0 with floor * R < 1 (R = {n_regimes})"),
            ));
        }
        Ok(())
    }

    /// Iterations `t` (1-based) with `t > T/2` count toward method usage.
    pub fn in_usage_window(&self, t: usize) -> bool {
        2 * t > self.iterations
    }
}

/// Which engine plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    NichePopulation,
    /// Every agent always plays the method with the best stationary-weighted affinity.
    Homogeneous,
    /// Every agent picks a uniformly random method each iteration.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Homogeneous,
    Random,
}

impl From<BaselineKind> for Policy {
    fn from(kind: BaselineKind) -> Self {
        match kind {
            BaselineKind::Homogeneous => Policy::Homogeneous,
            BaselineKind::Random => Policy::Random,
        }
    }
}

impl BaselineKind {
    pub fn label(self) -> &'static str {
        match self {
            BaselineKind::Homogeneous => "homogeneous",
            BaselineKind::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub regime: RegimeId,
    pub selections: Vec<MethodId>,
    pub raw_rewards: Vec<f64>,
    pub scores: Vec<f64>,
    pub winner: usize,
    /// The winner's affinity after its update. Every other agent is unchanged.
    pub winner_affinity: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config: EngineConfig,
    pub policy: Policy,
    pub environment: String,
    pub seed: u64,
    pub iterations: Vec<IterationRecord>,
    pub final_agents: Vec<AgentState>,
    pub summary: MetricSummary,
}

/// `N` blank agents: Beta(1,1) beliefs, uniform affinity, zero usage.
pub fn init_population(env: &EnvironmentSpec, cfg: &EngineConfig) -> Vec<AgentState> {
    vec![AgentState::blank(env.n_regimes(), env.n_methods()); cfg.n_agents]
}

/// Thompson sampling over the agent's beliefs for regime `r`. Ties go to the
/// lowest method index. Bumps the usage count when `record_usage` is set.
pub fn select_method(
    agent: &mut AgentState,
    r: RegimeId,
    rng: &mut RngStream,
    record_usage: bool,
) -> MethodId {
    let draws: Vec<f64> = agent.beliefs[r.0]
        .iter()
        .map(|b| rng.beta(b.success, b.failure))
        .collect();
    let m = MethodId(argmax_lowest(&draws));
    if record_usage {
        agent.method_usage_counts[m.0] += 1;
    }
    m
}

/// Competition score for a raw reward under the configured niche bonus.
pub fn adjusted_score(raw: f64, agent: &AgentState, r: RegimeId, cfg: &EngineConfig) -> f64 {
    let alpha_r = agent.affinity.get(r);
    match cfg.bonus_mode {
        BonusMode::Multiplicative => {
            if agent.affinity.primary() == r {
                raw * (1.0 + cfg.lambda * alpha_r)
            } else {
                raw
            }
        }
        BonusMode::CenteredAdditive => {
            raw + cfg.lambda * (alpha_r - 1.0 / agent.n_regimes() as f64)
        }
    }
}

/// Belief and affinity update for the iteration's winner.
///
/// The winning regime moves toward 1 by `eta`; every other regime drops by
/// `eta / (R - 1)` but not below the floor; the vector is then renormalized.
pub fn apply_winner_updates(
    winner: &mut AgentState,
    r: RegimeId,
    m: MethodId,
    score: f64,
    cfg: &EngineConfig,
) -> Result<()> {
    if !score.is_finite() {
        return Err(Error::NonFiniteScore(score));
    }

    let belief = &mut winner.beliefs[r.0][m.0];
    match cfg.belief_update {
        BeliefUpdate::Unit => belief.success += 1.0,
        BeliefUpdate::RewardWeighted if cfg.reward_clamp_at_zero => {
            belief.success += score.max(0.0)
        }
        BeliefUpdate::RewardWeighted => {
            belief.success = (belief.success + score).max(MIN_BETA_PARAM)
        }
    }

    let n = winner.n_regimes();
    let probs = winner.affinity.probs_mut();
    if n > 1 {
        let step_down = cfg.eta / (n - 1) as f64;
        for (i, p) in probs.iter_mut().enumerate() {
            if i == r.0 {
                *p += cfg.eta * (1.0 - *p);
            } else {
                *p = (*p - step_down).max(cfg.affinity_floor);
            }
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(())
}

/// A trial in progress. Drive it with [`Trial::step`] to observe intermediate
/// states, or use [`run_trial`] / [`run_baseline`].
#[derive(Debug, Clone)]
pub struct Trial<'a> {
    env: &'a EnvironmentSpec,
    cfg: EngineConfig,
    policy: Policy,
    seed: u64,
    process: RegimeProcess,
    regime_rng: RngStream,
    selection_rng: RngStream,
    reward_rng: RngStream,
    agents: Vec<AgentState>,
    homogeneous_method: MethodId,
    t: usize,
}

impl<'a> Trial<'a> {
    pub fn new(
        env: &'a EnvironmentSpec,
        cfg: &EngineConfig,
        policy: Policy,
        seed: u64,
    ) -> Result<Self> {
        env.validate()?;
        cfg.validate(env.n_regimes())?;
        let mut cfg = cfg.clone();
        if policy != Policy::NichePopulation {
            // Baselines compete on raw reward; the niche bonus belongs to the
            // competitive engine only.
            cfg.lambda = 0.0;
        }
        let mut regime_rng = RngStream::substream(seed, 0);
        let mut process = env.process.clone();
        process.start(&mut regime_rng);
        Ok(Self {
            env,
            policy,
            seed,
            process,
            regime_rng,
            selection_rng: RngStream::substream(seed, 1),
            reward_rng: RngStream::substream(seed, 2),
            agents: init_population(env, &cfg),
            homogeneous_method: MethodId(argmax_lowest(&env.expected_affinity())),
            t: 0,
            cfg,
        })
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    /// Iterations completed so far.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_done(&self) -> bool {
        self.t >= self.cfg.iterations
    }

    /// Runs one iteration.
    pub fn step(&mut self) -> Result<IterationRecord> {
        self.t += 1;
        let t = self.t;
        let in_window = self.cfg.in_usage_window(t);
        let record_usage = in_window && self.cfg.usage_counting == UsageCounting::Selections;
        let regime = sample_regime(&mut self.process, &mut self.regime_rng);

        let n_methods = self.env.n_methods();
        let selections: Vec<MethodId> = self
            .agents
            .iter_mut()
            .map(|agent| {
                let m = match self.policy {
                    Policy::NichePopulation => {
                        return select_method(agent, regime, &mut self.selection_rng, record_usage)
                    }
                    Policy::Homogeneous => self.homogeneous_method,
                    Policy::Random => MethodId(self.selection_rng.index(n_methods)),
                };
                if record_usage {
                    agent.method_usage_counts[m.0] += 1;
                }
                m
            })
            .collect();

        let raw_rewards: Vec<f64> = match self.cfg.noise_sharing {
            NoiseSharing::PerAgent => selections
                .iter()
                .map(|m| realize_reward(self.env, regime, *m, &mut self.reward_rng))
                .collect(),
            NoiseSharing::PerMethod => {
                let outcomes: Vec<f64> = (0..n_methods)
                    .map(|m| realize_reward(self.env, regime, MethodId(m), &mut self.reward_rng))
                    .collect();
                selections.iter().map(|m| outcomes[m.0]).collect()
            }
        };

        let scores: Vec<f64> = self
            .agents
            .iter()
            .zip(&raw_rewards)
            .map(|(agent, raw)| adjusted_score(*raw, agent, regime, &self.cfg))
            .collect();
        let winner = argmax_lowest(&scores);
        apply_winner_updates(
            &mut self.agents[winner],
            regime,
            selections[winner],
            scores[winner],
            &self.cfg,
        )?;

        if in_window && self.cfg.usage_counting == UsageCounting::Wins {
            self.agents[winner].method_usage_counts[selections[winner].0] += 1;
        }

        Ok(IterationRecord {
            t,
            regime,
            selections,
            raw_rewards,
            scores,
            winner,
            winner_affinity: self.agents[winner].affinity.probs().to_vec(),
        })
    }

    /// Runs the remaining iterations and packages the result.
    pub fn run(mut self) -> Result<TrialRecord> {
        let mut iterations = Vec::with_capacity(self.cfg.iterations);
        while !self.is_done() {
            iterations.push(self.step()?);
        }
        let summary = population_summary(&self.agents, DEFAULT_TAU)?;
        Ok(TrialRecord {
            config: self.cfg,
            policy: self.policy,
            environment: self.env.name.clone(),
            seed: self.seed,
            iterations,
            final_agents: self.agents,
            summary,
        })
    }
}

/// One full competitive trial. A pure function of `(env, cfg, seed)`.
pub fn run_trial(env: &EnvironmentSpec, cfg: &EngineConfig, seed: u64) -> Result<TrialRecord> {
    Trial::new(env, cfg, Policy::NichePopulation, seed)?.run()
}

/// A baseline trial. Baselines run the same winner and affinity machinery as
/// the competitive engine but choose methods by a fixed rule and compete on raw
/// reward (`lambda` is treated as 0).
pub fn run_baseline(
    env: &EnvironmentSpec,
    cfg: &EngineConfig,
    kind: BaselineKind,
    seed: u64,
) -> Result<TrialRecord> {
    Trial::new(env, cfg, kind.into(), seed)?.run()
}
