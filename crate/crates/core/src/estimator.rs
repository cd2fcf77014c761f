//! Reward estimates for actions an agent did not play.
//!
//! The estimate is `eta / (psi_cont * psi_fair) * rate / rate_max` where
//! `psi_cont` counts the contenders heard at the candidate threshold,
//! `psi_fair` penalizes starving a neighbour the agent cannot hear, and
//! `eta` gates on the expected reception quality at the agent's own station.
//!
//! Agents see the current RSSI values (optionally perturbed by Gaussian
//! measurement noise) but never the environment's counterfactual outcomes.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel::{select_rate, sinr_db, PowerDbm, RateTable};
use crate::mac::{Action, Deployment, RssiMatrix};

/// What agent `n` knows about one neighbour `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeighborView {
    /// Neighbour AP's power at our AP, at its current transmit power.
    pub rssi_at_self: PowerDbm,
    /// Our AP's power at the neighbour's station, at the reference power.
    pub own_rssi_at_neighbor: PowerDbm,
    /// Neighbour AP's power at our station, at its current transmit power.
    pub interference_at_own_sta: PowerDbm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorInputs {
    pub neighbors: Vec<NeighborView>,
    /// Transmit power at which the own-power RSSIs were measured.
    pub reference_power: PowerDbm,
    pub rssi_at_own_sta: PowerDbm,
    pub cca: PowerDbm,
    pub capture_threshold_db: f64,
    /// `sinr > CE` when true, `sinr >= CE` otherwise.
    pub strict_capture: bool,
    pub omega: f64,
    pub noise: PowerDbm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorParams {
    pub omega: f64,
    pub strict_capture: bool,
    /// Standard deviation of RSSI measurement noise; 0 disables it.
    pub noise_sigma_db: f64,
}

impl EstimatorInputs {
    fn shift(&self, candidate_power: PowerDbm) -> f64 {
        candidate_power - self.reference_power
    }

    fn unheard(&self, cst: PowerDbm) -> impl Iterator<Item = &NeighborView> {
        self.neighbors.iter().filter(move |m| m.rssi_at_self < cst)
    }
}

pub fn contention_term(inputs: &EstimatorInputs, candidate_cst: PowerDbm) -> u32 {
    1 + inputs
        .neighbors
        .iter()
        .filter(|m| m.rssi_at_self >= candidate_cst)
        .count() as u32
}

pub fn fairness_term(inputs: &EstimatorInputs, candidate: &Action) -> f64 {
    let shift = inputs.shift(candidate.tx_power);
    let starves = inputs
        .unheard(candidate.cst)
        .any(|m| m.own_rssi_at_neighbor + shift >= inputs.cca);
    if starves {
        inputs.omega
    } else {
        1.0
    }
}

/// Expected SINR at our station; neighbours we would not defer to are assumed to overlap.
pub fn estimated_sinr_db(inputs: &EstimatorInputs, candidate: &Action) -> f64 {
    let signal = inputs.rssi_at_own_sta + inputs.shift(candidate.tx_power);
    let interferers: Vec<PowerDbm> = inputs
        .unheard(candidate.cst)
        .map(|m| m.interference_at_own_sta)
        .collect();
    sinr_db(signal, &interferers, inputs.noise)
}

pub fn capture_gate(inputs: &EstimatorInputs, candidate: &Action) -> bool {
    let sinr = estimated_sinr_db(inputs, candidate);
    if inputs.strict_capture {
        sinr > inputs.capture_threshold_db
    } else {
        sinr >= inputs.capture_threshold_db
    }
}

pub fn estimate_reward(
    inputs: &EstimatorInputs,
    candidate: &Action,
    rate_table: &RateTable,
    gamma_max: f64,
) -> f64 {
    debug_assert!(gamma_max > 0.0);
    if !capture_gate(inputs, candidate) {
        return 0.0;
    }
    let psi = contention_term(inputs, candidate.cst) as f64 * fairness_term(inputs, candidate);
    let rssi = inputs.rssi_at_own_sta + inputs.shift(candidate.tx_power);
    let rate = select_rate(rate_table, rssi).rate_mbps;
    (rate / gamma_max / psi).clamp(0.0, 1.0)
}

/// Inputs for agent `n` read from the current RSSI matrix.
pub fn estimator_inputs<R: Rng + ?Sized>(
    dep: &Deployment,
    rssi: &RssiMatrix,
    profile: &[Action],
    n: usize,
    params: &EstimatorParams,
    rng: Option<&mut R>,
) -> EstimatorInputs {
    let mut measure: Box<dyn FnMut(PowerDbm) -> PowerDbm + '_> =
        match (rng, params.noise_sigma_db > 0.0) {
            (Some(rng), true) => {
                let normal = Normal::new(0.0, params.noise_sigma_db)
                    .expect("sigma is validated as finite and positive");
                Box::new(move |p: PowerDbm| p + normal.sample(rng))
            }
            _ => Box::new(|p| p),
        };
    let rssi_at_own_sta = measure(rssi.serving(n));
    let neighbors = (0..dep.len())
        .filter(|&m| m != n)
        .map(|m| NeighborView {
            rssi_at_self: measure(rssi.ap_to_ap[m][n]),
            own_rssi_at_neighbor: measure(rssi.ap_to_sta[n][m]),
            interference_at_own_sta: measure(rssi.ap_to_sta[m][n]),
        })
        .collect();
    EstimatorInputs {
        neighbors,
        reference_power: profile[n].tx_power,
        rssi_at_own_sta,
        cca: dep.radio.cca_dbm,
        capture_threshold_db: dep.radio.capture_threshold_db,
        strict_capture: params.strict_capture,
        omega: params.omega,
        noise: dep.radio.noise_dbm,
    }
}
