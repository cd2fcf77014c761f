//! Pure-strategy regret-matching over a decayed swap-regret matrix.
//!
//! `q[j][k]` accumulates how much better action `k` would have done in the
//! rounds where `j` was played. After playing `a`, only row `a` is updated
//! and the preference vector is rebuilt from it; the next action is the
//! argmax of that vector.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SimRng;

pub const DEFAULT_LAMBDA: f64 = 0.95;

/// Two preference values closer than this count as tied.
const TIE_EPS: f64 = 1e-12;
/// Slack allowed between the played entry of a hypothetical vector and the actual reward.
const PLAYED_REWARD_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct AgentState {
    q: Vec<Vec<f64>>,
    pi: Vec<f64>,
    last_action: Option<usize>,
    mu: f64,
    lambda: f64,
    global_decay: bool,
    rng: SimRng,
}

/// Serializable view of an agent for debug traces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentSnapshot {
    pub q: Vec<Vec<f64>>,
    pub pi: Vec<f64>,
    pub last_action: Option<usize>,
}

impl AgentState {
    /// `k` actions, uniform preference, empty regret matrix, `mu = 2(k - 1)`.
    pub fn new(k: usize, lambda: f64, rng: SimRng) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("actions", "action set is empty"));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::config("learning.lambda", "must be in (0, 1]"));
        }
        Ok(Self {
            q: vec![vec![0.0; k]; k],
            pi: vec![1.0 / k as f64; k],
            last_action: None,
            mu: 2.0 * (k as f64 - 1.0),
            lambda,
            global_decay: false,
            rng,
        })
    }

    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::config("learning.mu", "must be positive"));
        }
        self.mu = mu;
        Ok(self)
    }

    /// Decay every row of `q` on each update instead of only the played one.
    pub fn with_global_decay(mut self, on: bool) -> Self {
        self.global_decay = on;
        self
    }

    /// Seed the keep-current tie rule so the first pick is `action`.
    pub fn with_initial_action(mut self, action: usize) -> Result<Self> {
        if action >= self.k() {
            return Err(Error::ActionIndex {
                index: action,
                count: self.k(),
            });
        }
        self.last_action = Some(action);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn q(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn preference(&self) -> &[f64] {
        &self.pi
    }

    pub fn last_action(&self) -> Option<usize> {
        self.last_action
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn snapshot(&self) -> AgentSnapshot {
        AgentSnapshot {
            q: self.q.clone(),
            pi: self.pi.clone(),
            last_action: self.last_action,
        }
    }
}

/// Argmax of the preference vector. Ties keep the last action when it is among
/// the maximizers, otherwise one maximizer is drawn uniformly.
pub fn rm_select_action(state: &mut AgentState) -> usize {
    let best = state.pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..state.k())
        .filter(|&k| state.pi[k] >= best - TIE_EPS)
        .collect();
    match state.last_action {
        Some(a) if ties.contains(&a) => a,
        _ if ties.len() == 1 => ties[0],
        _ => ties[state.rng.gen_range(0..ties.len())],
    }
}

/// Feed back the outcome of playing `played`.
///
/// `hypothetical[k]` is the (estimated) reward action `k` would have earned;
/// its `played` entry must equal `actual`. All rewards must lie in `[0, 1]`.
pub fn rm_update(
    state: &mut AgentState,
    played: usize,
    actual: f64,
    hypothetical: &[f64],
) -> Result<()> {
    let k = state.k();
    if played >= k {
        return Err(Error::ActionIndex {
            index: played,
            count: k,
        });
    }
    if hypothetical.len() != k {
        return Err(Error::ProfileLength {
            expected: k,
            got: hypothetical.len(),
        });
    }
    for &r in hypothetical.iter().chain(std::iter::once(&actual)) {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::RewardOutOfRange { value: r });
        }
    }
    if (hypothetical[played] - actual).abs() > PLAYED_REWARD_EPS {
        return Err(Error::PlayedRewardMismatch {
            actual,
            hypothetical: hypothetical[played],
        });
    }

    let lambda = state.lambda;
    if state.global_decay {
        for (j, row) in state.q.iter_mut().enumerate() {
            if j != played {
                row.iter_mut().for_each(|x| *x *= lambda);
            }
        }
    }
    let r_a = hypothetical[played];
    let row = &mut state.q[played];
    for (q, &r_k) in row.iter_mut().zip(hypothetical) {
        *q = (lambda * *q + (r_k - r_a)).max(0.0);
    }
    row[played] = 0.0;

    // With the keep-current tie rule a row can accumulate slightly more than mu
    // in total, so normalize by whichever is larger. The argmax is unaffected.
    let total: f64 = row.iter().sum();
    let denom = state.mu.max(total);
    if denom > 0.0 {
        for (p, &q) in state.pi.iter_mut().zip(row.iter()) {
            *p = q / denom;
        }
        state.pi[played] = (1.0 - total / denom).max(0.0);
    } else {
        state.pi.iter_mut().for_each(|p| *p = 0.0);
        state.pi[played] = 1.0;
    }
    state.last_action = Some(played);

    debug_assert!(state.q.iter().flatten().all(|&x| x >= 0.0));
    debug_assert!((state.pi.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn agent(k: usize) -> AgentState {
        AgentState::new(k, DEFAULT_LAMBDA, substream(0, 1)).unwrap()
    }

    #[test]
    fn unique_argmax() {
        let mut s = agent(4);
        s.pi = vec![0.1, 0.7, 0.1, 0.1];
        assert_eq!(rm_select_action(&mut s), 1);
    }

    #[test]
    fn keep_current_on_tie() {
        let mut s = agent(4);
        s.last_action = Some(2);
        for _ in 0..10 {
            assert_eq!(rm_select_action(&mut s), 2);
        }
    }

    #[test]
    fn first_pick_is_seeded() {
        let picks = |seed| {
            (0..4u64)
                .map(|i| {
                    let mut s = AgentState::new(4, 0.95, substream(seed, i)).unwrap();
                    rm_select_action(&mut s)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(picks(3), picks(3));
        let seen: std::collections::HashSet<usize> = (0..20u64).flat_map(picks).collect();
        assert!(seen.len() > 1);
    }

    #[test]
    fn two_action_update() {
        let mut s = agent(2);
        rm_update(&mut s, 0, 0.2, &[0.2, 0.8]).unwrap();
        assert!((s.q[0][1] - 0.6).abs() < 1e-12);
        assert_eq!(s.mu, 2.0);
        assert!((s.pi[0] - 0.7).abs() < 1e-12);
        assert!((s.pi[1] - 0.3).abs() < 1e-12);
        assert_eq!(s.last_action, Some(0));
    }

    #[test]
    fn equal_rewards_decay_row() {
        let mut s = agent(3);
        rm_update(&mut s, 0, 0.0, &[0.0, 1.0, 0.5]).unwrap();
        let before = s.q[0].clone();
        let pi0 = s.pi[0];
        rm_update(&mut s, 0, 0.5, &[0.5, 0.5, 0.5]).unwrap();
        assert!((s.q[0][1] - 0.95 * before[1]).abs() < 1e-12);
        assert!((s.q[0][2] - 0.95 * before[2]).abs() < 1e-12);
        assert!(s.pi[0] > pi0);
    }

    #[test]
    fn negative_regret_clamped() {
        let mut s = agent(2);
        rm_update(&mut s, 0, 0.9, &[0.9, 0.1]).unwrap();
        assert_eq!(s.q[0][1], 0.0);
        assert_eq!(s.pi, vec![1.0, 0.0]);
    }

    #[test]
    fn only_played_row_changes() {
        let mut s = agent(3);
        rm_update(&mut s, 1, 0.0, &[1.0, 0.0, 1.0]).unwrap();
        let row1 = s.q[1].clone();
        rm_update(&mut s, 0, 0.0, &[0.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.q[1], row1);
        assert_eq!(s.q[2], vec![0.0; 3]);
    }

    #[test]
    fn global_decay_touches_other_rows() {
        let mut s = agent(3).with_global_decay(true);
        rm_update(&mut s, 1, 0.0, &[1.0, 0.0, 1.0]).unwrap();
        let row1 = s.q[1].clone();
        rm_update(&mut s, 0, 0.0, &[0.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.q[1][0], 0.95 * row1[0]);
    }

    #[test]
    fn preference_stays_valid_past_mu() {
        // A tie under keep-current lets row 0 reach (1.5, 1.5, 1.5) while action 0
        // is still played; one more extreme round pushes the row total past mu = 6.
        let mut s = agent(4);
        s.q[0] = vec![0.0, 1.5, 1.5, 1.5];
        rm_update(&mut s, 0, 0.0, &[0.0, 1.0, 1.0, 1.0]).unwrap();
        let total: f64 = s.q[0].iter().sum();
        assert!(total > s.mu);
        assert!(s.pi.iter().all(|&p| p >= 0.0));
        assert!((s.pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(s.pi[0], 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let mut s = agent(2);
        assert!(matches!(
            rm_update(&mut s, 0, 1.2, &[1.2, 0.0]),
            Err(Error::RewardOutOfRange { .. })
        ));
        assert!(matches!(
            rm_update(&mut s, 0, 0.5, &[0.4, 0.0]),
            Err(Error::PlayedRewardMismatch { .. })
        ));
        assert!(matches!(
            rm_update(&mut s, 5, 0.5, &[0.5, 0.0]),
            Err(Error::ActionIndex { .. })
        ));
        assert!(rm_update(&mut s, 0, 0.5, &[0.5]).is_err());
    }

    #[test]
    fn single_action_agent() {
        let mut s = agent(1);
        assert_eq!(rm_select_action(&mut s), 0);
        rm_update(&mut s, 0, 0.3, &[0.3]).unwrap();
        assert_eq!(s.pi, vec![1.0]);
    }
}
