//! Analytical CSMA/CA environment.
//!
//! Maps a deployment and a joint action profile to per-BSS airtime, SINR and
//! throughput. Slotted backoff is not simulated; instead:
//!
//! * BSSs connected by mutual carrier sensing share the medium equally.
//! * A BSS that defers to a neighbour which does not defer back only gets
//!   the airtime that neighbour leaves unused (full-buffer traffic means an
//!   isolated aggressor leaves none).
//! * BSSs that ignore each other transmit concurrently and interfere at each
//!   other's stations. A frame is lost when the SINR at the station is below
//!   the capture threshold, or when a concurrent OBSS transmission reaches the
//!   station above its CCA level (stations do not apply spatial-reuse
//!   thresholds, so they lock onto the stronger OBSS frame: hidden node).

use serde::{Deserialize, Serialize};

use crate::channel::{
    path_loss_db, select_rate, sinr_db, PathLossModel, PowerDbm, RateSelection, RateTable,
};
use crate::error::{Error, Result};

/// A (carrier-sense threshold, transmit power) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub cst: PowerDbm,
    pub tx_power: PowerDbm,
}

impl Action {
    pub fn new(cst_dbm: f64, tx_power_dbm: f64) -> Self {
        Self {
            cst: PowerDbm(cst_dbm),
            tx_power: PowerDbm(tx_power_dbm),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// One AP with its single associated station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bss {
    pub ap: Position,
    pub sta: Position,
}

/// How the environment picks the MCS of a successful transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateRule {
    /// Best MCS supported by the serving-link RSSI.
    #[default]
    Rssi,
    /// MCS from `min(rssi, noise + sinr)`, i.e. degraded by interference.
    SinrLimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioParams {
    pub noise_dbm: PowerDbm,
    pub cca_dbm: PowerDbm,
    pub capture_threshold_db: f64,
    /// Environment treats `sinr >= CE` as success when true, `sinr > CE` otherwise.
    pub capture_inclusive: bool,
    /// Stations drop frames when a concurrent OBSS signal at them is >= CCA.
    pub sta_blocking: bool,
    pub rate_rule: RateRule,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            noise_dbm: PowerDbm(-95.0),
            cca_dbm: PowerDbm(-82.0),
            capture_threshold_db: 10.0,
            capture_inclusive: true,
            sta_blocking: true,
            rate_rule: RateRule::Rssi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub bss: Vec<Bss>,
    pub radio: RadioParams,
    pub path_loss: PathLossModel,
    pub rate_table: RateTable,
}

impl Deployment {
    pub fn new(
        bss: Vec<Bss>,
        radio: RadioParams,
        path_loss: PathLossModel,
        rate_table: RateTable,
    ) -> Result<Self> {
        if bss.is_empty() {
            return Err(Error::config("deployment", "needs at least one BSS"));
        }
        let finite = |p: &Position| p.x.is_finite() && p.y.is_finite();
        if let Some(i) = bss.iter().position(|b| !finite(&b.ap) || !finite(&b.sta)) {
            return Err(Error::config(
                format!("deployment.bss[{i}]"),
                "positions must be finite",
            ));
        }
        path_loss.validate()?;
        Ok(Self {
            bss,
            radio,
            path_loss,
            rate_table,
        })
    }

    pub fn len(&self) -> usize {
        self.bss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bss.is_empty()
    }

    /// Loss between AP `from` and node `to_pos` belonging to BSS `to`.
    fn link_loss(&self, from: usize, to: usize, to_pos: &Position) -> f64 {
        let d = self.bss[from].ap.distance(to_pos);
        if from == to {
            path_loss_db(&self.path_loss, d)
        } else {
            self.path_loss.cross_bss_loss_db(d)
        }
    }
}

/// Received powers for one joint profile.
///
/// `ap_to_ap[i][j]` is AP i's power at AP j, `ap_to_sta[i][j]` AP i's power
/// at the station of BSS j. Diagonal `ap_to_sta` entries are serving links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RssiMatrix {
    pub ap_to_ap: Vec<Vec<PowerDbm>>,
    pub ap_to_sta: Vec<Vec<PowerDbm>>,
}

impl RssiMatrix {
    pub fn serving(&self, j: usize) -> PowerDbm {
        self.ap_to_sta[j][j]
    }
}

fn check_profile(dep: &Deployment, profile: &[Action]) -> Result<()> {
    if profile.len() != dep.len() {
        return Err(Error::ProfileLength {
            expected: dep.len(),
            got: profile.len(),
        });
    }
    Ok(())
}

pub fn compute_rssi_matrix(dep: &Deployment, profile: &[Action]) -> Result<RssiMatrix> {
    check_profile(dep, profile)?;
    let n = dep.len();
    let build = |target: &dyn Fn(usize) -> Position| -> Vec<Vec<PowerDbm>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| profile[i].tx_power - dep.link_loss(i, j, &target(j)))
                    .collect()
            })
            .collect()
    };
    Ok(RssiMatrix {
        ap_to_ap: build(&|j| dep.bss[j].ap),
        ap_to_sta: build(&|j| dep.bss[j].sta),
    })
}

/// Directed "defers to" relation between BSSs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensingGraph {
    /// `edges[i][j]`: BSS j senses BSS i and defers to it.
    edges: Vec<Vec<bool>>,
}

impl SensingGraph {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edge i -> j: j defers to i.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges[i][j]
    }

    pub fn mutual(&self, i: usize, j: usize) -> bool {
        self.edges[i][j] && self.edges[j][i]
    }

    /// Neither defers to the other, so both may transmit at once.
    pub fn concurrent(&self, i: usize, j: usize) -> bool {
        i != j && !self.edges[i][j] && !self.edges[j][i]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().flatten().filter(|&&e| e).count()
    }

    /// Connected components of the mutual-sensing relation, as a component id per BSS.
    pub fn mutual_components(&self) -> Vec<usize> {
        let n = self.len();
        let mut comp: Vec<usize> = (0..n).collect();
        fn root(comp: &mut [usize], mut x: usize) -> usize {
            while comp[x] != x {
                comp[x] = comp[comp[x]];
                x = comp[x];
            }
            x
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if self.mutual(i, j) {
                    let (a, b) = (root(&mut comp, i), root(&mut comp, j));
                    if a != b {
                        comp[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        (0..n).map(|i| root(&mut comp, i)).collect()
    }
}

pub fn sensing_graph(m: &RssiMatrix, profile: &[Action]) -> SensingGraph {
    let n = profile.len();
    let edges = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && m.ap_to_ap[i][j] >= profile[j].cst)
                .collect()
        })
        .collect();
    SensingGraph { edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BssOutcome {
    pub airtime_share: f64,
    pub sinr_db: f64,
    pub mcs: Option<u8>,
    pub rate_mbps: f64,
    pub throughput_mbps: f64,
    /// Airtime cut below its clique share by an aggressor it cannot silence.
    pub starved: bool,
    /// SINR at the station under the capture threshold.
    pub capture_failed: bool,
    /// A concurrent OBSS transmission reached the station at or above CCA.
    pub sta_blocked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacOutcome {
    pub bss: Vec<BssOutcome>,
}

impl MacOutcome {
    pub fn throughputs(&self) -> impl Iterator<Item = f64> + '_ {
        self.bss.iter().map(|b| b.throughput_mbps)
    }

    pub fn total_throughput(&self) -> f64 {
        self.throughputs().sum()
    }

    pub fn min_throughput(&self) -> f64 {
        self.throughputs().fold(f64::INFINITY, f64::min)
    }
}

/// Per-BSS airtime shares plus the starvation flag.
pub fn airtime_shares(graph: &SensingGraph) -> Vec<(f64, bool)> {
    let n = graph.len();
    let comp = graph.mutual_components();
    let base: Vec<f64> = (0..n)
        .map(|i| 1.0 / comp.iter().filter(|&&c| c == comp[i]).count() as f64)
        .collect();
    (0..n)
        .map(|j| {
            let residual = (0..n)
                .filter(|&i| graph.has_edge(i, j) && !graph.has_edge(j, i))
                .map(|i| 1.0 - base[i])
                .fold(base[j], f64::min);
            (residual.max(0.0), residual < base[j])
        })
        .collect()
}

pub fn simulate_profile(dep: &Deployment, profile: &[Action]) -> Result<MacOutcome> {
    let m = compute_rssi_matrix(dep, profile)?;
    let graph = sensing_graph(&m, profile);
    let shares = airtime_shares(&graph);
    let radio = &dep.radio;
    let n = dep.len();

    let bss = (0..n)
        .map(|j| {
            let (airtime_share, starved) = shares[j];
            let interferers: Vec<PowerDbm> = (0..n)
                .filter(|&i| graph.concurrent(i, j))
                .map(|i| m.ap_to_sta[i][j])
                .collect();
            let serving = m.serving(j);
            let sinr = sinr_db(serving, &interferers, radio.noise_dbm);
            let capture_failed = if radio.capture_inclusive {
                sinr < radio.capture_threshold_db
            } else {
                sinr <= radio.capture_threshold_db
            };
            let sta_blocked = radio.sta_blocking && interferers.iter().any(|&p| p >= radio.cca_dbm);
            let quality = match radio.rate_rule {
                RateRule::Rssi => serving,
                RateRule::SinrLimited => PowerDbm(serving.0.min(radio.noise_dbm.0 + sinr)),
            };
            let RateSelection { mcs, rate_mbps } = select_rate(&dep.rate_table, quality);
            let throughput_mbps = if capture_failed || sta_blocked {
                0.0
            } else {
                airtime_share * rate_mbps
            };
            BssOutcome {
                airtime_share,
                sinr_db: sinr,
                mcs,
                rate_mbps,
                throughput_mbps,
                starved,
                capture_failed,
                sta_blocked,
            }
        })
        .collect();
    Ok(MacOutcome { bss })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    Sum,
    Min,
}

impl Objective {
    pub fn evaluate(self, outcome: &MacOutcome) -> f64 {
        match self {
            Objective::Sum => outcome.total_throughput(),
            Objective::Min => outcome.min_throughput(),
        }
    }
}

pub const ENUMERATION_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    /// Action indices, one per BSS.
    pub profile: Vec<usize>,
    pub value: f64,
    pub outcome: MacOutcome,
}

/// Iterates joint profiles (as index vectors) in lexicographic order.
pub(crate) struct ProfileIter {
    next: Option<Vec<usize>>,
    k: usize,
}

impl ProfileIter {
    pub(crate) fn new(players: usize, k: usize) -> Self {
        Self {
            next: (k > 0).then(|| vec![0; players]),
            k,
        }
    }
}

impl Iterator for ProfileIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for pos in (0..succ.len()).rev() {
            succ[pos] += 1;
            if succ[pos] < self.k {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

pub fn resolve_profile(actions: &[Action], indices: &[usize]) -> Result<Vec<Action>> {
    indices
        .iter()
        .map(|&i| {
            actions.get(i).copied().ok_or(Error::ActionIndex {
                index: i,
                count: actions.len(),
            })
        })
        .collect()
}

/// Exhaustive search over all joint profiles. Ties keep the lexicographically first.
pub fn brute_force_optimum(
    dep: &Deployment,
    action_set: &[Action],
    objective: Objective,
) -> Result<Optimum> {
    let size = (action_set.len() as u128).checked_pow(dep.len() as u32);
    match size {
        Some(s) if s <= ENUMERATION_BUDGET => {}
        _ => {
            return Err(Error::EnumerationBudget {
                size: size.unwrap_or(u128::MAX),
                budget: ENUMERATION_BUDGET,
            })
        }
    }
    if action_set.is_empty() {
        return Err(Error::config("actions", "action set is empty"));
    }
    let mut best: Option<Optimum> = None;
    for idx in ProfileIter::new(dep.len(), action_set.len()) {
        let outcome = simulate_profile(dep, &resolve_profile(action_set, &idx)?)?;
        let value = objective.evaluate(&outcome);
        if best.as_ref().is_none_or(|b| value > b.value) {
            best = Some(Optimum {
                profile: idx,
                value,
                outcome,
            });
        }
    }
    Ok(best.expect("non-empty enumeration"))
}

/// True when no BSS can raise its own throughput by a unilateral change.
pub fn is_pure_nash(dep: &Deployment, action_set: &[Action], profile: &[usize]) -> Result<bool> {
    let mut joint = resolve_profile(action_set, profile)?;
    let base = simulate_profile(dep, &joint)?;
    for n in 0..dep.len() {
        let own = base.bss[n].throughput_mbps;
        for alt in action_set {
            let keep = joint[n];
            joint[n] = *alt;
            let dev = simulate_profile(dep, &joint)?.bss[n].throughput_mbps;
            joint[n] = keep;
            if dev > own + 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_deployment(d_ap_ap: f64, d_ap_sta: f64, pl: PathLossModel) -> Deployment {
        Deployment::new(
            vec![
                Bss {
                    ap: Position::new(0.0, 0.0),
                    sta: Position::new(-d_ap_sta, 0.0),
                },
                Bss {
                    ap: Position::new(d_ap_ap, 0.0),
                    sta: Position::new(d_ap_ap + d_ap_sta, 0.0),
                },
            ],
            RadioParams::default(),
            pl,
            RateTable::default(),
        )
        .unwrap()
    }

    fn plain_loss() -> PathLossModel {
        PathLossModel {
            pl0_db: 40.0,
            exponent: 3.0,
            min_distance_m: 1.0,
            inter_bss_loss_db: 0.0,
        }
    }

    #[test]
    fn colocated_aps_symmetric() {
        let dep = line_deployment(0.0, 2.0, plain_loss());
        let p = [Action::new(-82.0, 20.0); 2];
        let m = compute_rssi_matrix(&dep, &p).unwrap();
        assert_eq!(m.ap_to_ap[0][1], m.ap_to_ap[1][0]);
        assert_eq!(m.ap_to_ap[0][1].0, 20.0 - 40.0);
    }

    #[test]
    fn power_shift_moves_row_only() {
        let dep = Deployment::default_toy(5.0);
        let hi = [Action::new(-82.0, 20.0), Action::new(-82.0, 20.0)];
        let lo = [Action::new(-82.0, 5.0), Action::new(-82.0, 20.0)];
        let a = compute_rssi_matrix(&dep, &hi).unwrap();
        let b = compute_rssi_matrix(&dep, &lo).unwrap();
        for j in 0..2 {
            assert!((a.ap_to_sta[0][j] - b.ap_to_sta[0][j] - 15.0).abs() < 1e-12);
            assert!((a.ap_to_ap[0][j] - b.ap_to_ap[0][j] - 15.0).abs() < 1e-12);
            assert_eq!(a.ap_to_sta[1][j], b.ap_to_sta[1][j]);
        }
    }

    #[test]
    fn strong_geometry_link_budget() {
        // pl0 51, n 4.5, 15 dB inter-BSS, by hand:
        // serving 2 m: 20 - (51 + 45 log10 2)            = -44.5463498...
        // AP-AP 5 m:   20 - (51 + 45 log10 5 + 15)       = -77.4536501...
        // AP->other STA 7 m: 20 - (51 + 45 log10 7 + 15) = -84.0294118...
        let dep = Deployment::default_toy(5.0);
        let m = compute_rssi_matrix(&dep, &[Action::new(-72.0, 20.0); 2]).unwrap();
        assert!(
            (m.serving(0).0 - -44.546_349_804_879_156).abs() < 1e-9,
            "{:?}",
            m.serving(0)
        );
        assert!(
            (m.ap_to_ap[0][1].0 - -77.453_650_195_120_84).abs() < 1e-9,
            "{:?}",
            m.ap_to_ap[0][1]
        );
        assert!(
            (m.ap_to_sta[1][0].0 - -84.029_411_800_641_55).abs() < 1e-9,
            "{:?}",
            m.ap_to_sta[1][0]
        );
        assert_eq!(m.ap_to_sta[0][1], m.ap_to_sta[1][0]);
    }

    #[test]
    fn sensing_threshold_comparisons() {
        let mk = |v: f64| RssiMatrix {
            ap_to_ap: vec![
                vec![PowerDbm(0.0), PowerDbm(v)],
                vec![PowerDbm(v), PowerDbm(0.0)],
            ],
            ap_to_sta: vec![vec![PowerDbm(0.0); 2]; 2],
        };
        let p = [Action::new(-72.0, 20.0); 2];
        assert!(sensing_graph(&mk(-70.0), &p).has_edge(0, 1));
        assert!(!sensing_graph(&mk(-75.0), &p).has_edge(0, 1));
        let p62 = [Action::new(-62.0, 20.0); 2];
        assert_eq!(sensing_graph(&mk(-65.0), &p62).edge_count(), 0);
    }

    #[test]
    fn mutual_sensing_time_shares() {
        let dep = line_deployment(5.0, 2.0, plain_loss());
        let out = simulate_profile(&dep, &[Action::new(-82.0, 20.0); 2]).unwrap();
        for b in &out.bss {
            assert_eq!(b.airtime_share, 0.5);
            assert!(!b.capture_failed && !b.starved);
            assert_eq!(b.throughput_mbps, 0.5 * b.rate_mbps);
        }
    }

    #[test]
    fn full_reuse_and_collision() {
        let strong = Deployment::default_toy(5.0);
        let out = simulate_profile(&strong, &[Action::new(-72.0, 20.0); 2]).unwrap();
        for b in &out.bss {
            assert_eq!(b.airtime_share, 1.0);
            assert!(b.throughput_mbps > 0.0);
        }
        let weak = Deployment::default_toy(4.0);
        let out = simulate_profile(&weak, &[Action::new(-72.0, 20.0); 2]).unwrap();
        for b in &out.bss {
            assert_eq!(b.airtime_share, 1.0);
            assert!(b.capture_failed || b.sta_blocked);
            assert_eq!(b.throughput_mbps, 0.0);
        }
    }

    #[test]
    fn sinr_capture_gate_alone() {
        // Without station blocking, a geometry with near-equal signal and interference
        // fails purely on SINR.
        let mut dep = line_deployment(0.0, 2.0, plain_loss());
        dep.bss[1].sta = Position::new(-2.0, 0.0);
        dep.radio.sta_blocking = false;
        let out = simulate_profile(&dep, &[Action::new(-10.0, 20.0); 2]).unwrap();
        assert!(out
            .bss
            .iter()
            .all(|b| b.capture_failed && b.throughput_mbps == 0.0));
    }

    #[test]
    fn asymmetric_sensing_starves() {
        let dep = Deployment::default_toy(4.0);
        // BSS 0 at -72 does not hear BSS 1; BSS 1 at -82 hears BSS 0 at 20 dBm.
        let out =
            simulate_profile(&dep, &[Action::new(-72.0, 20.0), Action::new(-82.0, 20.0)]).unwrap();
        assert_eq!(out.bss[0].airtime_share, 1.0);
        assert_eq!(out.bss[1].airtime_share, 0.0);
        assert!(out.bss[1].starved);
        assert_eq!(out.bss[1].throughput_mbps, 0.0);
        assert!(out.bss[0].throughput_mbps > 0.0);
    }

    #[test]
    fn profile_length_checked() {
        let dep = Deployment::default_toy(5.0);
        assert!(matches!(
            simulate_profile(&dep, &[Action::new(-82.0, 20.0)]),
            Err(Error::ProfileLength {
                expected: 2,
                got: 1
            })
        ));
    }

    #[test]
    fn single_bss_optimum() {
        let dep = Deployment::new(
            vec![Bss {
                ap: Position::new(0.0, 0.0),
                sta: Position::new(3.0, 0.0),
            }],
            RadioParams::default(),
            PathLossModel::default(),
            RateTable::default(),
        )
        .unwrap();
        let actions = [
            Action::new(-82.0, 10.0),
            Action::new(-82.0, 20.0),
            Action::new(-72.0, 20.0),
        ];
        let opt = brute_force_optimum(&dep, &actions, Objective::Sum).unwrap();
        assert_eq!(opt.profile, vec![1]);
        assert_eq!(opt.outcome.bss[0].airtime_share, 1.0);
    }

    #[test]
    fn enumeration_budget_enforced() {
        let dep = Deployment::new(
            (0..6)
                .map(|i| Bss {
                    ap: Position::new(10.0 * i as f64, 0.0),
                    sta: Position::new(10.0 * i as f64, 2.0),
                })
                .collect(),
            RadioParams::default(),
            PathLossModel::default(),
            RateTable::default(),
        )
        .unwrap();
        let actions: Vec<Action> = (0..12).map(|i| Action::new(-82.0, i as f64)).collect();
        assert!(matches!(
            brute_force_optimum(&dep, &actions, Objective::Sum),
            Err(Error::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn profile_iter_is_lexicographic() {
        let all: Vec<Vec<usize>> = ProfileIter::new(2, 3).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[8], vec![2, 2]);
    }

    impl Deployment {
        /// Two BSSs on a line, stations 2 m outward, default radio.
        fn default_toy(d_ap_ap: f64) -> Deployment {
            line_deployment(d_ap_ap, 2.0, PathLossModel::default())
        }
    }
}
