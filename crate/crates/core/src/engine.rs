//! Repeated-game driver.
//!
//! One iteration: every agent picks an action without seeing the others'
//! choices, the MAC model scores the joint profile, each agent gets its own
//! normalized throughput, regret-matching agents additionally get estimated
//! rewards for their other actions, then all agents update.
//!
//! Regret figures in the summary are computed separately from exact
//! counterfactuals (re-simulating with one agent's action swapped). Agents
//! never see those.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{PathLossModel, RateTable};
use crate::error::{Error, Result};
use crate::estimator::{estimate_reward, estimator_inputs, EstimatorParams};
use crate::learning::game::max_ce_violation;
use crate::learning::{
    external_regret, internal_regret, play_regret_matching, rm_select_action, rm_update,
    static_select_action, AbstractGame, AgentSnapshot, AgentState, EpsGreedyState, History,
    PolicyKind, DEFAULT_EPS0, DEFAULT_LAMBDA,
};
use crate::mac::{
    compute_rssi_matrix, resolve_profile, simulate_profile, Action, Bss, Deployment, MacOutcome,
    Position, RadioParams,
};
use crate::rng::{substream, SimRng, STREAM_AGENT_BASE, STREAM_GEOMETRY, STREAM_NOISE_BASE};

/// 100 s of simulated time in 0.5 s decision intervals.
pub const DEFAULT_ITERATIONS: usize = 200;
pub const DEFAULT_DEPLOYMENTS: usize = 100;

pub const TABLE_CST_DBM: [f64; 3] = [-62.0, -72.0, -82.0];
pub const TABLE_POWER_DBM: [f64; 4] = [5.0, 10.0, 15.0, 20.0];
pub const TOY_CST_DBM: [f64; 2] = [-72.0, -82.0];
pub const TOY_POWER_DBM: [f64; 2] = [10.0, 20.0];

pub const DEFAULT_ACTION: Action = Action {
    cst: crate::channel::PowerDbm(-82.0),
    tx_power: crate::channel::PowerDbm(20.0),
};

/// CST-major grid: all powers for the first threshold, then the next threshold.
pub fn action_grid(cst_dbm: &[f64], power_dbm: &[f64]) -> Vec<Action> {
    cst_dbm
        .iter()
        .flat_map(|&c| power_dbm.iter().map(move |&p| Action::new(c, p)))
        .collect()
}

/// A1..A4 = (-72, 10), (-72, 20), (-82, 10), (-82, 20).
pub fn toy_action_set() -> Vec<Action> {
    action_grid(&TOY_CST_DBM, &TOY_POWER_DBM)
}

pub fn table_action_set() -> Vec<Action> {
    action_grid(&TABLE_CST_DBM, &TABLE_POWER_DBM)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    ToyStrong,
    ToyWeak,
    Random,
    Custom,
    AbstractGame,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::ToyStrong,
        ScenarioKind::ToyWeak,
        ScenarioKind::Random,
        ScenarioKind::Custom,
        ScenarioKind::AbstractGame,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ToyStrong => "toy_strong",
            ScenarioKind::ToyWeak => "toy_weak",
            ScenarioKind::Random => "random",
            ScenarioKind::Custom => "custom",
            ScenarioKind::AbstractGame => "abstract_game",
        }
    }

    pub fn is_toy(self) -> bool {
        matches!(self, ScenarioKind::ToyStrong | ScenarioKind::ToyWeak)
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningParams {
    pub lambda: f64,
    pub eps0: f64,
    pub omega: f64,
    /// Overrides `2(K - 1)` when set.
    pub mu: Option<f64>,
    pub global_decay: bool,
    /// Learners begin at the default action instead of a random one.
    pub start_from_default: bool,
    pub strict_capture: bool,
    pub noise_sigma_db: f64,
}

impl LearningParams {
    pub fn for_bss_count(n: usize) -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            eps0: DEFAULT_EPS0,
            omega: 2.0 * n as f64,
            mu: None,
            global_decay: false,
            start_from_default: true,
            strict_capture: true,
            noise_sigma_db: 0.0,
        }
    }

    fn estimator(&self) -> EstimatorParams {
        EstimatorParams {
            omega: self.omega,
            strict_capture: self.strict_capture,
            noise_sigma_db: self.noise_sigma_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub d_ap_ap: f64,
    /// AP-station distance for toy kinds.
    pub d_ap_sta: f64,
    /// Station radius range for random deployments.
    pub d_ap_sta_range: (f64, f64),
    pub num_bss: usize,
    pub custom_bss: Vec<Bss>,
    pub action_set: Vec<Action>,
    pub default_action: Action,
    /// One entry per BSS, or a single entry shared by all.
    pub policies: Vec<PolicyKind>,
    pub iterations: usize,
    pub seed: u64,
    pub num_deployments: usize,
    pub radio: RadioParams,
    pub path_loss: PathLossModel,
    pub rate_table: RateTable,
    pub learning: LearningParams,
    pub game: Option<AbstractGame>,
}

impl ScenarioSpec {
    /// Defaults for a kind: toy kinds get their fixed geometry and four actions,
    /// random deployments the full 12-action grid.
    pub fn new(kind: ScenarioKind) -> Self {
        let (d_ap_ap, action_set) = match kind {
            ScenarioKind::ToyStrong => (5.0, toy_action_set()),
            ScenarioKind::ToyWeak => (4.0, toy_action_set()),
            _ => (5.0, table_action_set()),
        };
        Self {
            kind,
            d_ap_ap,
            d_ap_sta: 2.0,
            d_ap_sta_range: (3.0, 5.0),
            num_bss: 2,
            custom_bss: Vec::new(),
            action_set,
            default_action: DEFAULT_ACTION,
            policies: vec![PolicyKind::RegretMatching],
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
            num_deployments: DEFAULT_DEPLOYMENTS,
            radio: RadioParams::default(),
            path_loss: PathLossModel::default(),
            rate_table: RateTable::default(),
            learning: LearningParams::for_bss_count(2),
            game: None,
        }
    }

    pub fn with_policy(mut self, p: PolicyKind) -> Self {
        self.policies = vec![p];
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn bss_count(&self) -> usize {
        match self.kind {
            ScenarioKind::Custom => self.custom_bss.len(),
            ScenarioKind::AbstractGame => self.game.as_ref().map_or(0, AbstractGame::players),
            _ => self.num_bss,
        }
    }

    pub fn policy_for(&self, n: usize) -> PolicyKind {
        if self.policies.len() == 1 {
            self.policies[0]
        } else {
            self.policies[n]
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::config("scenario.iterations", "must be at least 1"));
        }
        if self.kind == ScenarioKind::AbstractGame {
            if self.game.is_none() {
                return Err(Error::config(
                    "game",
                    "abstract_game scenario needs a [game] section",
                ));
            }
            return Ok(());
        }
        let n = self.bss_count();
        if n == 0 {
            return Err(Error::config("scenario", "no BSSs to simulate"));
        }
        if self.policies.is_empty() || (self.policies.len() != 1 && self.policies.len() != n) {
            return Err(Error::config(
                "scenario.policies",
                format!("expected 1 or {n} entries, got {}", self.policies.len()),
            ));
        }
        if self.action_set.is_empty() {
            return Err(Error::config("actions", "action set is empty"));
        }
        if !(self.d_ap_ap >= 0.0 && self.d_ap_ap.is_finite()) {
            return Err(Error::config(
                "scenario.d_ap_ap",
                "must be a non-negative distance",
            ));
        }
        if !(self.d_ap_sta >= 0.0 && self.d_ap_sta.is_finite()) {
            return Err(Error::config(
                "scenario.d_ap_sta",
                "must be a non-negative distance",
            ));
        }
        let (lo, hi) = self.d_ap_sta_range;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::config(
                "scenario.d_ap_sta_range",
                "must satisfy 0 <= min <= max",
            ));
        }
        let l = &self.learning;
        if !(l.lambda > 0.0 && l.lambda <= 1.0) {
            return Err(Error::config("learning.lambda", "must be in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&l.eps0) {
            return Err(Error::config("learning.eps0", "must be in [0, 1]"));
        }
        if !(l.omega >= 1.0 && l.omega.is_finite()) {
            return Err(Error::config("learning.omega", "must be at least 1"));
        }
        if !(l.noise_sigma_db >= 0.0 && l.noise_sigma_db.is_finite()) {
            return Err(Error::config(
                "learning.noise_sigma_db",
                "must be non-negative",
            ));
        }
        if let Some(mu) = l.mu {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::config("learning.mu", "must be positive"));
            }
        }
        if (0..n).any(|i| self.policy_for(i) != PolicyKind::RegretMatching) || l.start_from_default
        {
            static_select_action(&self.action_set, &self.default_action)?;
        }
        Ok(())
    }
}

/// Geometry for a scenario. Only random kinds consume randomness.
pub fn build_deployment<R: Rng + ?Sized>(spec: &ScenarioSpec, rng: &mut R) -> Result<Deployment> {
    let line = |i: usize| Position::new(i as f64 * spec.d_ap_ap, 0.0);
    let bss = match spec.kind {
        ScenarioKind::ToyStrong | ScenarioKind::ToyWeak => {
            // APs on the x axis; the first station sits left of its AP, the others right,
            // so with two BSSs both stations face away from the other AP.
            (0..spec.num_bss)
                .map(|i| {
                    let ap = line(i);
                    let dir = if i == 0 { -1.0 } else { 1.0 };
                    Bss {
                        ap,
                        sta: Position::new(ap.x + dir * spec.d_ap_sta, 0.0),
                    }
                })
                .collect()
        }
        ScenarioKind::Random => {
            let (lo, hi) = spec.d_ap_sta_range;
            (0..spec.num_bss)
                .map(|i| {
                    let ap = line(i);
                    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                    let r = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                    Bss {
                        ap,
                        sta: Position::new(ap.x + r * theta.cos(), ap.y + r * theta.sin()),
                    }
                })
                .collect()
        }
        ScenarioKind::Custom => spec.custom_bss.clone(),
        ScenarioKind::AbstractGame => {
            return Err(Error::config(
                "scenario.kind",
                "abstract_game has no deployment",
            ))
        }
    };
    Deployment::new(bss, spec.radio, spec.path_loss, spec.rate_table.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BssRecord {
    pub action_index: usize,
    pub throughput_mbps: f64,
    pub reward: f64,
    /// Estimated rewards the agent learned from (regret-matching only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothetical: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    /// 1-based.
    pub t: usize,
    pub bss: Vec<BssRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<Vec<Option<AgentSnapshot>>>,
}

impl IterationRecord {
    pub fn profile(&self) -> Vec<usize> {
        self.bss.iter().map(|b| b.action_index).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub iterations: usize,
    pub num_bss: usize,
    /// Averaged over BSSs and iterations.
    pub mean_throughput_mbps: f64,
    /// Smallest per-BSS time-averaged throughput.
    pub min_bss_throughput_mbps: f64,
    pub per_bss_mean_throughput_mbps: Vec<f64>,
    pub action_histograms: Vec<Vec<u64>>,
    /// Cumulative regret against exact counterfactuals, per BSS.
    pub external_regret: Vec<f64>,
    pub internal_regret: Vec<f64>,
    pub final_profile: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub deployment: Deployment,
    pub records: Vec<IterationRecord>,
    pub summary: RunSummary,
    /// Exact counterfactual rewards per BSS.
    pub histories: Vec<History>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EpisodeOptions {
    /// Attach Q and preference snapshots of regret-matching agents to each record.
    pub snapshots: bool,
}

#[allow(clippy::large_enum_variant)]
enum Agent {
    Static(usize),
    EpsGreedy(EpsGreedyState, SimRng),
    RegretMatching(Box<AgentState>),
}

impl Agent {
    fn build(spec: &ScenarioSpec, n: usize, seed: u64) -> Result<Agent> {
        let k = spec.action_set.len();
        let rng = substream(seed, STREAM_AGENT_BASE + n as u64);
        let default = || static_select_action(&spec.action_set, &spec.default_action);
        let l = &spec.learning;
        Ok(match spec.policy_for(n) {
            PolicyKind::Static => Agent::Static(default()?),
            PolicyKind::EpsGreedy => {
                let mut rng = rng;
                let start = if l.start_from_default {
                    default()?
                } else {
                    rng.gen_range(0..k)
                };
                Agent::EpsGreedy(EpsGreedyState::new(k, start, l.eps0), rng)
            }
            PolicyKind::RegretMatching => {
                let mut s = AgentState::new(k, l.lambda, rng)?.with_global_decay(l.global_decay);
                if let Some(mu) = l.mu {
                    s = s.with_mu(mu)?;
                }
                if l.start_from_default {
                    s = s.with_initial_action(default()?)?;
                }
                Agent::RegretMatching(Box::new(s))
            }
        })
    }

    fn select(&mut self, t: usize) -> usize {
        match self {
            Agent::Static(a) => *a,
            Agent::EpsGreedy(s, rng) => s.select(t as u64, rng),
            Agent::RegretMatching(s) => rm_select_action(s),
        }
    }
}

/// The environment is deterministic, so each joint profile is simulated once per episode.
struct OutcomeCache<'a> {
    dep: &'a Deployment,
    actions: &'a [Action],
    map: HashMap<Vec<usize>, MacOutcome>,
}

impl<'a> OutcomeCache<'a> {
    fn new(dep: &'a Deployment, actions: &'a [Action]) -> Self {
        Self {
            dep,
            actions,
            map: HashMap::new(),
        }
    }

    fn get(&mut self, joint: &[usize]) -> Result<&MacOutcome> {
        if !self.map.contains_key(joint) {
            let out = simulate_profile(self.dep, &resolve_profile(self.actions, joint)?)?;
            self.map.insert(joint.to_vec(), out);
        }
        Ok(&self.map[joint])
    }
}

pub fn run_episode(spec: &ScenarioSpec) -> Result<Episode> {
    run_episode_with(spec, EpisodeOptions::default())
}

pub fn run_episode_with(spec: &ScenarioSpec, opts: EpisodeOptions) -> Result<Episode> {
    spec.validate()?;
    let dep = build_deployment(spec, &mut substream(spec.seed, STREAM_GEOMETRY))?;
    run_on_deployment(spec, dep, opts)
}

/// Runs `spec` on an already-built deployment, seeding agents from `spec.seed`.
pub fn run_on_deployment(
    spec: &ScenarioSpec,
    dep: Deployment,
    opts: EpisodeOptions,
) -> Result<Episode> {
    let n_bss = dep.len();
    let k = spec.action_set.len();
    if spec.policies.len() != 1 && spec.policies.len() != n_bss {
        return Err(Error::config(
            "scenario.policies",
            "one entry per BSS required",
        ));
    }
    let gamma_max = dep.rate_table.max_rate_mbps();
    let est_params = spec.learning.estimator();
    let mut agents = (0..n_bss)
        .map(|n| Agent::build(spec, n, spec.seed))
        .collect::<Result<Vec<_>>>()?;
    let mut noise_rngs: Vec<SimRng> = (0..n_bss)
        .map(|n| substream(spec.seed, STREAM_NOISE_BASE + n as u64))
        .collect();
    let mut histories: Vec<History> = (0..n_bss).map(|_| History::new(k)).collect();
    let mut records = Vec::with_capacity(spec.iterations);
    let normalize = |tp: f64| (tp / gamma_max).clamp(0.0, 1.0);
    let mut cache = OutcomeCache::new(&dep, &spec.action_set);

    for t in 1..=spec.iterations {
        let chosen: Vec<usize> = agents.iter_mut().map(|a| a.select(t)).collect();
        let profile = resolve_profile(&spec.action_set, &chosen)?;
        let outcome = cache.get(&chosen)?.clone();
        let rssi = compute_rssi_matrix(&dep, &profile)?;

        let mut bss = Vec::with_capacity(n_bss);
        for (n, agent) in agents.iter_mut().enumerate() {
            let played = chosen[n];
            let throughput_mbps = outcome.bss[n].throughput_mbps;
            let reward = normalize(throughput_mbps);
            let hypothetical = match agent {
                Agent::Static(_) => None,
                Agent::EpsGreedy(s, _) => {
                    s.update(played, reward);
                    None
                }
                Agent::RegretMatching(s) => {
                    let inputs = estimator_inputs(
                        &dep,
                        &rssi,
                        &profile,
                        n,
                        &est_params,
                        Some(&mut noise_rngs[n]),
                    );
                    let r_hat: Vec<f64> = spec
                        .action_set
                        .iter()
                        .enumerate()
                        .map(|(k, cand)| {
                            if k == played {
                                reward
                            } else {
                                estimate_reward(&inputs, cand, &dep.rate_table, gamma_max)
                            }
                        })
                        .collect();
                    rm_update(s, played, reward, &r_hat)?;
                    Some(r_hat)
                }
            };
            bss.push(BssRecord {
                action_index: played,
                throughput_mbps,
                reward,
                hypothetical,
            });
        }

        // Exact counterfactuals for regret reporting.
        for (n, history) in histories.iter_mut().enumerate() {
            let mut joint = chosen.clone();
            let mut truth = Vec::with_capacity(k);
            for k_idx in 0..k {
                joint[n] = k_idx;
                truth.push(normalize(cache.get(&joint)?.bss[n].throughput_mbps));
            }
            history.push(chosen[n], truth)?;
        }

        let snapshots = opts.snapshots.then(|| {
            agents
                .iter()
                .map(|a| match a {
                    Agent::RegretMatching(s) => Some(s.snapshot()),
                    _ => None,
                })
                .collect()
        });
        records.push(IterationRecord { t, bss, snapshots });
    }

    let summary = summarize(&records, &histories, n_bss, k);
    Ok(Episode {
        deployment: dep,
        records,
        summary,
        histories,
    })
}

fn summarize(
    records: &[IterationRecord],
    histories: &[History],
    n_bss: usize,
    k: usize,
) -> RunSummary {
    let t_count = records.len();
    let mut total = 0.0;
    let mut per_bss = vec![0.0; n_bss];
    let mut hist = vec![vec![0u64; k]; n_bss];
    for r in records {
        for (n, b) in r.bss.iter().enumerate() {
            total += b.throughput_mbps;
            per_bss[n] += b.throughput_mbps;
            hist[n][b.action_index] += 1;
        }
    }
    let per_bss: Vec<f64> = per_bss.into_iter().map(|s| s / t_count as f64).collect();
    RunSummary {
        iterations: t_count,
        num_bss: n_bss,
        mean_throughput_mbps: total / (t_count * n_bss) as f64,
        min_bss_throughput_mbps: per_bss.iter().copied().fold(f64::INFINITY, f64::min),
        per_bss_mean_throughput_mbps: per_bss,
        action_histograms: hist,
        external_regret: histories.iter().map(external_regret).collect(),
        internal_regret: histories.iter().map(internal_regret).collect(),
        final_profile: records
            .last()
            .map(IterationRecord::profile)
            .unwrap_or_default(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeploymentRow {
    pub seed: u64,
    pub mean_throughput_mbps: f64,
    pub min_bss_throughput_mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub deployments: usize,
    /// Mean over deployments of the per-deployment mean throughput.
    pub mean_throughput_mbps: f64,
    /// Mean over deployments of the per-deployment minimum BSS throughput.
    pub min_throughput_mbps: f64,
    pub rows: Vec<DeploymentRow>,
}

/// `num_deployments` independent episodes; deployment `d` uses seed `spec.seed + d`.
/// Episodes run in parallel; aggregation order is fixed.
pub fn run_campaign(spec: &ScenarioSpec) -> Result<CampaignSummary> {
    spec.validate()?;
    if spec.num_deployments == 0 {
        return Err(Error::config(
            "scenario.num_deployments",
            "must be at least 1",
        ));
    }
    let rows = (0..spec.num_deployments as u64)
        .into_par_iter()
        .map(|d| {
            let seed = spec.seed.wrapping_add(d);
            let s = ScenarioSpec {
                seed,
                ..spec.clone()
            };
            let ep = run_episode(&s)?;
            Ok(DeploymentRow {
                seed,
                mean_throughput_mbps: ep.summary.mean_throughput_mbps,
                min_bss_throughput_mbps: ep.summary.min_bss_throughput_mbps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let d = rows.len() as f64;
    Ok(CampaignSummary {
        deployments: rows.len(),
        mean_throughput_mbps: rows.iter().map(|r| r.mean_throughput_mbps).sum::<f64>() / d,
        min_throughput_mbps: rows.iter().map(|r| r.min_bss_throughput_mbps).sum::<f64>() / d,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSummary {
    pub rounds: u64,
    /// Internal regret divided by the number of rounds, per player.
    pub avg_internal_regret: Vec<f64>,
    pub avg_external_regret: Vec<f64>,
    pub empirical_distribution: Vec<f64>,
    /// Largest expected gain from any swap deviation under the empirical distribution.
    pub ce_violation: f64,
}

pub fn run_game(spec: &ScenarioSpec) -> Result<GameSummary> {
    spec.validate()?;
    let game = spec
        .game
        .as_ref()
        .ok_or_else(|| Error::config("game", "missing game definition"))?;
    let play = play_regret_matching(
        game,
        spec.iterations as u64,
        spec.seed,
        spec.learning.lambda,
    )?;
    let t = play.rounds as f64;
    let dist = play.empirical_distribution();
    Ok(GameSummary {
        rounds: play.rounds,
        avg_internal_regret: play
            .histories
            .iter()
            .map(|h| internal_regret(h) / t)
            .collect(),
        avg_external_regret: play
            .histories
            .iter()
            .map(|h| external_regret(h) / t)
            .collect(),
        ce_violation: max_ce_violation(game, &dist),
        empirical_distribution: dist,
    })
}

/// Checks that the toy geometries produce the two regimes the experiments rely on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    /// Strong toy, both (-72, 20): both BSSs transmit concurrently and decode.
    pub strong_full_reuse: bool,
    /// Weak toy, both (-72, 20): both frames lost.
    pub weak_full_power_collides: bool,
    /// Weak toy, both (-72, 10): both BSSs transmit concurrently and decode.
    pub weak_low_power_reuses: bool,
}

impl CalibrationReport {
    pub fn passed(&self) -> bool {
        self.strong_full_reuse && self.weak_full_power_collides && self.weak_low_power_reuses
    }
}

pub fn calibration_gate(
    radio: RadioParams,
    path_loss: PathLossModel,
    rate_table: &RateTable,
) -> Result<CalibrationReport> {
    let build = |kind| {
        let mut s = ScenarioSpec::new(kind);
        s.radio = radio;
        s.path_loss = path_loss;
        s.rate_table = rate_table.clone();
        build_deployment(&s, &mut substream(0, STREAM_GEOMETRY))
    };
    let strong = build(ScenarioKind::ToyStrong)?;
    let weak = build(ScenarioKind::ToyWeak)?;
    let reuse = |dep: &Deployment, p: f64| -> Result<bool> {
        let out = simulate_profile(dep, &[Action::new(-72.0, p); 2])?;
        Ok(out
            .bss
            .iter()
            .all(|b| b.airtime_share == 1.0 && b.throughput_mbps > 0.0))
    };
    let collides = simulate_profile(&weak, &[Action::new(-72.0, 20.0); 2])?
        .bss
        .iter()
        .all(|b| {
            b.airtime_share == 1.0
                && b.throughput_mbps == 0.0
                && (b.capture_failed || b.sta_blocked)
        });
    Ok(CalibrationReport {
        strong_full_reuse: reuse(&strong, 20.0)?,
        weak_full_power_collides: collides,
        weak_low_power_reuses: reuse(&weak, 10.0)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_geometry() {
        let spec = ScenarioSpec::new(ScenarioKind::ToyStrong);
        let dep = build_deployment(&spec, &mut substream(0, 0)).unwrap();
        assert_eq!(dep.bss[0].ap, Position::new(0.0, 0.0));
        assert_eq!(dep.bss[1].ap, Position::new(5.0, 0.0));
        assert_eq!(dep.bss[0].sta, Position::new(-2.0, 0.0));
        assert_eq!(dep.bss[1].sta, Position::new(7.0, 0.0));
        let weak = build_deployment(
            &ScenarioSpec::new(ScenarioKind::ToyWeak),
            &mut substream(0, 0),
        )
        .unwrap();
        assert_eq!(weak.bss[1].ap.x, 4.0);
    }

    #[test]
    fn random_geometry_is_seeded() {
        let spec = ScenarioSpec::new(ScenarioKind::Random);
        let a = build_deployment(&spec, &mut substream(9, 0)).unwrap();
        let b = build_deployment(&spec, &mut substream(9, 0)).unwrap();
        let c = build_deployment(&spec, &mut substream(10, 0)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for bss in &a.bss {
            let r = bss.ap.distance(&bss.sta);
            assert!((3.0..=5.0).contains(&r), "{r}");
        }
    }

    #[test]
    fn action_sets() {
        let toy = toy_action_set();
        assert_eq!(
            toy,
            vec![
                Action::new(-72.0, 10.0),
                Action::new(-72.0, 20.0),
                Action::new(-82.0, 10.0),
                Action::new(-82.0, 20.0),
            ]
        );
        let grid = table_action_set();
        assert_eq!(grid.len(), 12);
        assert_eq!(static_select_action(&grid, &DEFAULT_ACTION).unwrap(), 11);
    }

    #[test]
    fn static_toy_strong_time_shares() {
        let spec = ScenarioSpec::new(ScenarioKind::ToyStrong).with_policy(PolicyKind::Static);
        let ep = run_episode(&spec).unwrap();
        let first = ep.records[0].clone();
        for r in &ep.records {
            assert_eq!(r.bss, first.bss);
        }
        let out = simulate_profile(&ep.deployment, &[DEFAULT_ACTION; 2]).unwrap();
        assert!(out.bss.iter().all(|b| b.airtime_share == 0.5));
    }

    #[test]
    fn single_iteration_summary() {
        let mut spec = ScenarioSpec::new(ScenarioKind::ToyWeak);
        spec.iterations = 1;
        let ep = run_episode(&spec).unwrap();
        assert_eq!(ep.records.len(), 1);
        let r = &ep.records[0];
        let mean = r.bss.iter().map(|b| b.throughput_mbps).sum::<f64>() / 2.0;
        assert_eq!(ep.summary.mean_throughput_mbps, mean);
        assert_eq!(ep.summary.final_profile, r.profile());
    }

    #[test]
    fn campaign_of_one_matches_episode() {
        let mut spec = ScenarioSpec::new(ScenarioKind::Random).with_seed(42);
        spec.num_deployments = 1;
        spec.iterations = 30;
        let c = run_campaign(&spec).unwrap();
        let e = run_episode(&spec).unwrap();
        assert_eq!(c.mean_throughput_mbps, e.summary.mean_throughput_mbps);
        assert_eq!(c.min_throughput_mbps, e.summary.min_bss_throughput_mbps);
    }

    #[test]
    fn episode_rejects_policy_mismatch() {
        let mut spec = ScenarioSpec::new(ScenarioKind::ToyStrong);
        spec.policies = vec![PolicyKind::Static; 3];
        assert!(run_episode(&spec).is_err());
    }

    #[test]
    fn default_calibration_passes() {
        let r = calibration_gate(
            RadioParams::default(),
            PathLossModel::default(),
            &RateTable::default(),
        )
        .unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
