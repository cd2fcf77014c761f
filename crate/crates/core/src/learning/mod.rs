//! Agent policies and regret accounting.

pub mod eps_greedy;
pub mod game;
pub mod regret;
pub mod regret_matching;
pub mod static_policy;

use serde::{Deserialize, Serialize};

pub use eps_greedy::{eg_select_action, exploration_probability, EpsGreedyState, DEFAULT_EPS0};
pub use game::{play_regret_matching, verify_correlated_equilibrium, AbstractGame, GamePlay};
pub use regret::{external_regret, internal_regret, History, HistoryEntry};
pub use regret_matching::{rm_select_action, rm_update, AgentSnapshot, AgentState, DEFAULT_LAMBDA};
pub use static_policy::static_select_action;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Static,
    EpsGreedy,
    RegretMatching,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [
        PolicyKind::Static,
        PolicyKind::EpsGreedy,
        PolicyKind::RegretMatching,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Static => "static",
            PolicyKind::EpsGreedy => "eps_greedy",
            PolicyKind::RegretMatching => "regret_matching",
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                format!("unknown policy `{s}` (expected static, eps_greedy or regret_matching)")
            })
    }
}
