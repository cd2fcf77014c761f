//! External and internal (swap) regret over a recorded history.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub action: usize,
    pub actual: f64,
    /// Reward each action would have earned this round, others fixed.
    pub hypothetical: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct History {
    k: usize,
    entries: Vec<HistoryEntry>,
}

impl History {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            entries: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[HistoryEntry] {
        &self.entries
    }

    /// Records a round. The actual reward is read off `hypothetical[action]`.
    pub fn push(&mut self, action: usize, hypothetical: Vec<f64>) -> Result<()> {
        if hypothetical.len() != self.k {
            return Err(Error::ProfileLength {
                expected: self.k,
                got: hypothetical.len(),
            });
        }
        if action >= self.k {
            return Err(Error::ActionIndex {
                index: action,
                count: self.k,
            });
        }
        self.entries.push(HistoryEntry {
            action,
            actual: hypothetical[action],
            hypothetical,
        });
        Ok(())
    }
}

/// `max_k sum_t (r_t(k) - r_t(a_t))`. Zero for an empty history.
pub fn external_regret(history: &History) -> f64 {
    if history.is_empty() {
        return 0.0;
    }
    let mut totals = vec![0.0; history.k];
    for e in &history.entries {
        for (tot, &r) in totals.iter_mut().zip(&e.hypothetical) {
            *tot += r - e.actual;
        }
    }
    totals.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// `swap[j][k] = sum over rounds where j was played of (r_t(k) - r_t(j))`.
pub fn swap_regrets(history: &History) -> Vec<Vec<f64>> {
    let mut swap = vec![vec![0.0; history.k]; history.k];
    for e in &history.entries {
        let j = e.action;
        for (k, &r) in e.hypothetical.iter().enumerate() {
            swap[j][k] += r - e.hypothetical[j];
        }
    }
    swap
}

/// Largest swap regret over ordered pairs `j != k`. Zero when there are no pairs.
pub fn internal_regret(history: &History) -> f64 {
    let swap = swap_regrets(history);
    let mut best = f64::NEG_INFINITY;
    for (j, row) in swap.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if j != k {
                best = best.max(v);
            }
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(k: usize, rounds: &[(usize, &[f64])]) -> History {
        let mut h = History::new(k);
        for (a, r) in rounds {
            h.push(*a, r.to_vec()).unwrap();
        }
        h
    }

    #[test]
    fn best_fixed_action_has_no_external_regret() {
        let h = hist(2, &[(1, &[0.2, 0.9]), (1, &[0.5, 0.6])]);
        assert_eq!(external_regret(&h), 0.0);
    }

    #[test]
    fn external_two_rounds() {
        let h = hist(2, &[(0, &[0.5, 1.0]), (0, &[0.5, 1.0])]);
        assert_eq!(external_regret(&h), 1.0);
    }

    #[test]
    fn internal_single_action_pointwise_best() {
        let h = hist(3, &[(2, &[0.1, 0.2, 0.9]), (2, &[0.0, 0.0, 0.5])]);
        assert_eq!(internal_regret(&h), 0.0);
    }

    #[test]
    fn internal_two_rounds() {
        let h = hist(2, &[(0, &[0.2, 0.9]), (1, &[0.9, 0.2])]);
        assert!((internal_regret(&h) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn push_validates() {
        let mut h = History::new(2);
        assert!(h.push(0, vec![0.1]).is_err());
        assert!(h.push(2, vec![0.1, 0.2]).is_err());
        assert!(h.is_empty());
    }
}
