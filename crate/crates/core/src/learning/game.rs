//! Finite normal-form games with payoffs in `[0, 1]`, used to check what
//! regret-matching converges to independently of the radio model.

use serde::{Deserialize, Serialize};

use super::regret::History;
use super::regret_matching::{rm_select_action, rm_update, AgentState};
use crate::error::{Error, Result};
use crate::rng::{substream, STREAM_AGENT_BASE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameRepr", into = "GameRepr")]
pub struct AbstractGame {
    action_counts: Vec<usize>,
    /// `payoffs[n][flat(joint)]`, row-major over players.
    payoffs: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameRepr {
    action_counts: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
}

impl TryFrom<GameRepr> for AbstractGame {
    type Error = Error;
    fn try_from(r: GameRepr) -> Result<Self> {
        Self::new(r.action_counts, r.payoffs)
    }
}

impl From<AbstractGame> for GameRepr {
    fn from(g: AbstractGame) -> Self {
        GameRepr {
            action_counts: g.action_counts,
            payoffs: g.payoffs,
        }
    }
}

impl AbstractGame {
    pub fn new(action_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if action_counts.is_empty() || action_counts.contains(&0) {
            return Err(Error::Game("every player needs at least one action".into()));
        }
        if payoffs.len() != action_counts.len() {
            return Err(Error::Game(format!(
                "{} payoff tensors for {} players",
                payoffs.len(),
                action_counts.len()
            )));
        }
        let size: usize = action_counts.iter().product();
        for (n, p) in payoffs.iter().enumerate() {
            if p.len() != size {
                return Err(Error::Game(format!(
                    "player {n} payoff tensor has {} entries, expected {size}",
                    p.len()
                )));
            }
            if let Some(v) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Game(format!("player {n} payoff {v} outside [0, 1]")));
            }
        }
        Ok(Self {
            action_counts,
            payoffs,
        })
    }

    /// Bimatrix game; `u1[i][j]` and `u2[i][j]` are payoffs when row plays i and column plays j.
    pub fn two_player(u1: &[Vec<f64>], u2: &[Vec<f64>]) -> Result<Self> {
        let rows = u1.len();
        let cols = u1.first().map_or(0, Vec::len);
        let flat = |u: &[Vec<f64>]| -> Result<Vec<f64>> {
            if u.len() != rows || u.iter().any(|r| r.len() != cols) {
                return Err(Error::Game("payoff matrices must share one shape".into()));
            }
            Ok(u.iter().flatten().copied().collect())
        };
        Self::new(vec![rows, cols], vec![flat(u1)?, flat(u2)?])
    }

    pub fn players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_profiles(&self) -> usize {
        self.action_counts.iter().product()
    }

    pub fn flat_index(&self, joint: &[usize]) -> usize {
        debug_assert_eq!(joint.len(), self.players());
        joint
            .iter()
            .zip(&self.action_counts)
            .fold(0, |acc, (&a, &k)| acc * k + a)
    }

    pub fn joint_of(&self, mut flat: usize) -> Vec<usize> {
        let mut joint = vec![0; self.players()];
        for (slot, &k) in joint.iter_mut().zip(&self.action_counts).rev() {
            *slot = flat % k;
            flat /= k;
        }
        joint
    }

    pub fn payoff(&self, player: usize, joint: &[usize]) -> f64 {
        self.payoffs[player][self.flat_index(joint)]
    }

    /// Player `n`'s payoff for each of its actions, others fixed at `joint`.
    pub fn deviation_payoffs(&self, player: usize, joint: &[usize]) -> Vec<f64> {
        let mut j = joint.to_vec();
        (0..self.action_counts[player])
            .map(|k| {
                j[player] = k;
                self.payoff(player, &j)
            })
            .collect()
    }
}

/// Checks every swap inequality of a correlated equilibrium:
/// for each player and recommended/deviation pair, the expected gain from
/// deviating when recommended `j` is at most `tolerance`.
pub fn verify_correlated_equilibrium(
    game: &AbstractGame,
    distribution: &[f64],
    tolerance: f64,
) -> Result<bool> {
    if distribution.len() != game.num_profiles() {
        return Err(Error::Game(format!(
            "distribution has {} entries for {} profiles",
            distribution.len(),
            game.num_profiles()
        )));
    }
    let mass: f64 = distribution.iter().sum();
    if (mass - 1.0).abs() > 1e-9 || distribution.iter().any(|&p| p < 0.0) {
        return Err(Error::Game(format!(
            "distribution is not a probability vector (sum {mass})"
        )));
    }
    Ok(max_ce_violation(game, distribution) <= tolerance)
}

/// Largest expected swap gain over all players and action pairs.
pub fn max_ce_violation(game: &AbstractGame, distribution: &[f64]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for n in 0..game.players() {
        let k_n = game.action_counts[n];
        let mut gain = vec![vec![0.0; k_n]; k_n];
        for (flat, &p) in distribution.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let joint = game.joint_of(flat);
            let j = joint[n];
            let here = game.payoff(n, &joint);
            for (k, dev) in game.deviation_payoffs(n, &joint).into_iter().enumerate() {
                gain[j][k] += p * (dev - here);
            }
        }
        for (j, row) in gain.iter().enumerate() {
            for (k, &g) in row.iter().enumerate() {
                if j != k {
                    worst = worst.max(g);
                }
            }
        }
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct GamePlay {
    /// Per-player full-information history.
    pub histories: Vec<History>,
    /// Visit counts per flat joint profile.
    pub joint_counts: Vec<u64>,
    pub rounds: u64,
}

impl GamePlay {
    pub fn empirical_distribution(&self) -> Vec<f64> {
        self.joint_counts
            .iter()
            .map(|&c| c as f64 / self.rounds as f64)
            .collect()
    }
}

/// Every player runs regret-matching with exact deviation payoffs as feedback.
pub fn play_regret_matching(
    game: &AbstractGame,
    rounds: u64,
    seed: u64,
    lambda: f64,
) -> Result<GamePlay> {
    let mut agents = game
        .action_counts
        .iter()
        .enumerate()
        .map(|(n, &k)| AgentState::new(k, lambda, substream(seed, STREAM_AGENT_BASE + n as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut histories: Vec<History> = game
        .action_counts
        .iter()
        .map(|&k| History::new(k))
        .collect();
    let mut joint_counts = vec![0u64; game.num_profiles()];

    for _ in 0..rounds {
        let joint: Vec<usize> = agents.iter_mut().map(rm_select_action).collect();
        joint_counts[game.flat_index(&joint)] += 1;
        for (n, agent) in agents.iter_mut().enumerate() {
            let rewards = game.deviation_payoffs(n, &joint);
            rm_update(agent, joint[n], rewards[joint[n]], &rewards)?;
            histories[n].push(joint[n], rewards)?;
        }
    }
    Ok(GamePlay {
        histories,
        joint_counts,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching_pennies() -> AbstractGame {
        AbstractGame::two_player(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap()
    }

    fn prisoners_dilemma() -> AbstractGame {
        AbstractGame::two_player(
            &[vec![0.6, 0.0], vec![1.0, 0.2]],
            &[vec![0.6, 1.0], vec![0.0, 0.2]],
        )
        .unwrap()
    }

    #[test]
    fn indexing_round_trips() {
        let g = AbstractGame::new(vec![2, 3, 2], vec![vec![0.0; 12]; 3]).unwrap();
        for f in 0..12 {
            assert_eq!(g.flat_index(&g.joint_of(f)), f);
        }
        assert_eq!(g.flat_index(&[1, 2, 1]), 11);
    }

    #[test]
    fn strict_nash_point_mass_is_ce() {
        let g = prisoners_dilemma();
        let mut p = vec![0.0; 4];
        p[g.flat_index(&[1, 1])] = 1.0;
        assert!(verify_correlated_equilibrium(&g, &p, 0.0).unwrap());
    }

    #[test]
    fn dominated_point_mass_is_not_ce() {
        let g = prisoners_dilemma();
        let mut p = vec![0.0; 4];
        p[g.flat_index(&[0, 0])] = 1.0;
        assert!(!verify_correlated_equilibrium(&g, &p, 0.0).unwrap());
    }

    #[test]
    fn uniform_matching_pennies_is_ce() {
        // Each swap inequality: 0.25 * (1 - 0) + 0.25 * (0 - 1) = 0.
        let g = matching_pennies();
        assert!(verify_correlated_equilibrium(&g, &[0.25; 4], 0.0).unwrap());
        assert_eq!(max_ce_violation(&g, &[0.25; 4]), 0.0);
    }

    #[test]
    fn rejects_malformed() {
        assert!(AbstractGame::new(vec![2, 2], vec![vec![0.0; 4]]).is_err());
        assert!(AbstractGame::new(vec![2], vec![vec![0.0, 2.0]]).is_err());
        let g = matching_pennies();
        assert!(verify_correlated_equilibrium(&g, &[0.5; 4], 0.1).is_err());
        assert!(verify_correlated_equilibrium(&g, &[1.0], 0.1).is_err());
    }

    #[test]
    fn play_is_deterministic() {
        let g = matching_pennies();
        let a = play_regret_matching(&g, 200, 4, 0.95).unwrap();
        let b = play_regret_matching(&g, 200, 4, 0.95).unwrap();
        assert_eq!(a.joint_counts, b.joint_counts);
        assert_eq!(a.joint_counts.iter().sum::<u64>(), 200);
    }
}
