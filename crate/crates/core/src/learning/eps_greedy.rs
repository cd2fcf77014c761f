//! ε-greedy over per-action empirical mean rewards with a decaying
//! exploration rate `eps0 / sqrt(t)`.

use rand::Rng;

pub const DEFAULT_EPS0: f64 = 0.1;

pub fn exploration_probability(t: u64, eps0: f64) -> f64 {
    assert!(t >= 1, "iterations are counted from 1");
    (eps0 / (t as f64).sqrt()).clamp(0.0, 1.0)
}

/// Draws the exploration coin; on heads returns a uniform action.
fn explore<R: Rng + ?Sized>(t: u64, k: usize, eps0: f64, rng: &mut R) -> Option<usize> {
    (rng.gen::<f64>() < exploration_probability(t, eps0)).then(|| rng.gen_range(0..k))
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn eg_select_action<R: Rng + ?Sized>(t: u64, values: &[f64], eps0: f64, rng: &mut R) -> usize {
    explore(t, values.len(), eps0, rng).unwrap_or_else(|| argmax_lowest(values))
}

/// Running sums for the empirical means. Unplayed actions are valued at 0.
#[derive(Debug, Clone)]
pub struct EpsGreedyState {
    sums: Vec<f64>,
    counts: Vec<u64>,
    start: usize,
    eps0: f64,
}

impl EpsGreedyState {
    /// `start` is exploited until the first observation arrives.
    pub fn new(k: usize, start: usize, eps0: f64) -> Self {
        assert!(start < k);
        Self {
            sums: vec![0.0; k],
            counts: vec![0; k],
            start,
            eps0,
        }
    }

    pub fn means(&self) -> Vec<f64> {
        self.sums
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn select<R: Rng + ?Sized>(&self, t: u64, rng: &mut R) -> usize {
        if let Some(a) = explore(t, self.sums.len(), self.eps0, rng) {
            return a;
        }
        if self.counts.iter().all(|&c| c == 0) {
            self.start
        } else {
            argmax_lowest(&self.means())
        }
    }

    pub fn update(&mut self, played: usize, reward: f64) {
        self.sums[played] += reward;
        self.counts[played] += 1;
    }
}
