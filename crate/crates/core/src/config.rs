//! TOML run configuration.
//!
//! Every section is optional; omitted keys take the reference defaults
//! (noise -95 dBm, CCA -82 dBm, capture 10 dB, 12-action grid, lambda 0.95,
//! eps0 0.1, omega 2N, 200 iterations). Unknown keys are rejected. After
//! [`RunConfig::resolve`] every kind-dependent value is filled in, so the
//! resolved config can be echoed next to the results and re-run as is.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{PathLossModel, RateTable};
use crate::engine::{
    action_grid, LearningParams, ScenarioKind, ScenarioSpec, DEFAULT_DEPLOYMENTS,
    DEFAULT_ITERATIONS, TABLE_CST_DBM, TABLE_POWER_DBM, TOY_CST_DBM, TOY_POWER_DBM,
};
use crate::error::{Error, Result};
use crate::learning::{AbstractGame, PolicyKind, DEFAULT_EPS0, DEFAULT_LAMBDA};
use crate::mac::{Action, Bss, Position, RadioParams};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub scenario: ScenarioConfig,
    pub actions: ActionsConfig,
    pub radio: RadioParams,
    pub path_loss: PathLossModel,
    pub learning: LearningConfig,
    /// MAC parameters of the reference setup. Recorded for provenance only;
    /// the airtime model does not simulate backoff or aggregation.
    pub mac: MacConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub game: Option<AbstractGame>,
    #[serde(skip_serializing_if = "SweepConfig::is_empty")]
    pub sweep: SweepConfig,
    pub output: OutputConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_table: Option<RateTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_ap_ap: Option<f64>,
    pub d_ap_sta: f64,
    pub d_ap_sta_range: [f64; 2],
    pub num_bss: usize,
    pub iterations: usize,
    pub num_deployments: usize,
    pub policy: PolicyKind,
    /// Per-BSS policies; overrides `policy`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<PolicyKind>>,
    /// Explicit geometry for `custom` scenarios.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bss: Vec<BssConfig>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::ToyStrong,
            d_ap_ap: None,
            d_ap_sta: 2.0,
            d_ap_sta_range: [3.0, 5.0],
            num_bss: 2,
            iterations: DEFAULT_ITERATIONS,
            num_deployments: DEFAULT_DEPLOYMENTS,
            policy: PolicyKind::RegretMatching,
            policies: None,
            bss: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BssConfig {
    pub ap: [f64; 2],
    pub sta: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActionsConfig {
    /// Defaults to {-72, -82} for toy scenarios and {-62, -72, -82} otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cst_dbm: Option<Vec<f64>>,
    /// Defaults to {10, 20} for toy scenarios and {5, 10, 15, 20} otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_dbm: Option<Vec<f64>>,
    pub default_cst_dbm: f64,
    pub default_power_dbm: f64,
}

impl Default for ActionsConfig {
    fn default() -> Self {
        Self {
            cst_dbm: None,
            power_dbm: None,
            default_cst_dbm: -82.0,
            default_power_dbm: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearningConfig {
    pub lambda: f64,
    pub eps0: f64,
    /// Fairness penalty; 2N when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Preference normalizer; 2(K - 1) when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    pub global_decay: bool,
    pub start_from_default: bool,
    pub strict_capture: bool,
    pub noise_sigma_db: f64,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            eps0: DEFAULT_EPS0,
            omega: None,
            mu: None,
            global_decay: false,
            start_from_default: true,
            strict_capture: true,
            noise_sigma_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MacConfig {
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub guard_interval_us: f64,
    pub spatial_streams: u32,
    pub txop_max_ms: f64,
    pub ampdu_max: u32,
    pub packet_bytes: u32,
    pub cw_initial: u32,
    pub cw_exponent_min: u32,
    pub cw_exponent_max: u32,
    pub iteration_duration_s: f64,
}

impl Default for MacConfig {
    fn default() -> Self {
        Self {
            carrier_ghz: 5.0,
            bandwidth_mhz: 20.0,
            guard_interval_us: 3.2,
            spatial_streams: 1,
            txop_max_ms: 5.484,
            ampdu_max: 64,
            packet_bytes: 1500,
            cw_initial: 16,
            cw_exponent_min: 1,
            cw_exponent_max: 5,
            iteration_duration_s: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_ap_ap: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<PolicyKind>>,
}

impl SweepConfig {
    pub fn is_empty(&self) -> bool {
        self.d_ap_ap.is_none() && self.seeds.is_none() && self.policies.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceLevel {
    /// Summary and config echo only.
    Summary,
    /// Adds the per-iteration CSV trace.
    #[default]
    Full,
    /// Adds a JSON-lines dump with estimates and agent state.
    Debug,
}

impl std::str::FromStr for TraceLevel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "summary" => Ok(TraceLevel::Summary),
            "full" => Ok(TraceLevel::Full),
            "debug" => Ok(TraceLevel::Debug),
            _ => Err(format!(
                "unknown trace level `{s}` (expected summary, full or debug)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub trace_level: TraceLevel,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            trace_level: TraceLevel::Full,
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub policy: Option<PolicyKind>,
    pub scenario: Option<ScenarioKind>,
    pub out: Option<PathBuf>,
    pub trace_level: Option<TraceLevel>,
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| Error::ConfigSyntax(e.to_string()))
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

fn check_finite(key: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, "must be a finite number"))
    }
}

fn check_list(key: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(key, "must not be empty"));
    }
    for (i, &v) in values.iter().enumerate() {
        check_finite(&format!("{key}[{i}]"), v)?;
        if values[..i].contains(&v) {
            return Err(Error::config(
                format!("{key}[{i}]"),
                format!("duplicate value {v}"),
            ));
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = o.policy {
            self.scenario.policy = p;
            self.scenario.policies = None;
        }
        if let Some(k) = o.scenario {
            self.scenario.kind = k;
        }
        if let Some(d) = &o.out {
            self.output.dir = d.clone();
        }
        if let Some(t) = o.trace_level {
            self.output.trace_level = t;
        }
    }

    fn bss_count(&self) -> usize {
        match self.scenario.kind {
            ScenarioKind::Custom => self.scenario.bss.len(),
            ScenarioKind::AbstractGame => self.game.as_ref().map_or(0, AbstractGame::players),
            _ => self.scenario.num_bss,
        }
    }

    /// Fills every kind-dependent default and validates ranges.
    pub fn resolve(mut self) -> Result<RunConfig> {
        let kind = self.scenario.kind;
        let toy = kind.is_toy();
        self.scenario.d_ap_ap.get_or_insert(match kind {
            ScenarioKind::ToyWeak => 4.0,
            _ => 5.0,
        });
        self.actions.cst_dbm.get_or_insert_with(|| {
            if toy {
                TOY_CST_DBM.to_vec()
            } else {
                TABLE_CST_DBM.to_vec()
            }
        });
        self.actions.power_dbm.get_or_insert_with(|| {
            if toy {
                TOY_POWER_DBM.to_vec()
            } else {
                TABLE_POWER_DBM.to_vec()
            }
        });
        let n = self.bss_count();
        self.learning.omega.get_or_insert(2.0 * n as f64);
        self.rate_table.get_or_insert_with(RateTable::default);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let sc = &self.scenario;
        if sc.kind == ScenarioKind::Custom && sc.bss.is_empty() {
            return Err(Error::config(
                "scenario.bss",
                "custom scenarios need at least one [[scenario.bss]]",
            ));
        }
        if sc.kind == ScenarioKind::AbstractGame && self.game.is_none() {
            return Err(Error::config(
                "game",
                "abstract_game scenarios need a [game] section",
            ));
        }
        if sc.kind.is_toy() && sc.num_bss < 2 {
            return Err(Error::config(
                "scenario.num_bss",
                "toy scenarios need at least 2 BSSs",
            ));
        }
        if sc.num_bss == 0 {
            return Err(Error::config("scenario.num_bss", "must be at least 1"));
        }
        if sc.iterations == 0 {
            return Err(Error::config("scenario.iterations", "must be at least 1"));
        }
        if sc.num_deployments == 0 {
            return Err(Error::config(
                "scenario.num_deployments",
                "must be at least 1",
            ));
        }
        for (i, b) in sc.bss.iter().enumerate() {
            for (j, v) in b.ap.iter().chain(&b.sta).enumerate() {
                check_finite(
                    &format!("scenario.bss[{i}].{}", if j < 2 { "ap" } else { "sta" }),
                    *v,
                )?;
            }
        }
        let radio = &self.radio;
        check_finite("radio.noise_dbm", radio.noise_dbm.0)?;
        check_finite("radio.cca_dbm", radio.cca_dbm.0)?;
        check_finite("radio.capture_threshold_db", radio.capture_threshold_db)?;
        self.path_loss.validate()?;

        let cst = self.actions.cst_dbm.as_deref().unwrap_or_default();
        let pwr = self.actions.power_dbm.as_deref().unwrap_or_default();
        check_list("actions.cst_dbm", cst)?;
        check_list("actions.power_dbm", pwr)?;
        if !cst.contains(&self.actions.default_cst_dbm) {
            return Err(Error::config(
                "actions.default_cst_dbm",
                format!(
                    "{} is not one of the configured thresholds",
                    self.actions.default_cst_dbm
                ),
            ));
        }
        if !pwr.contains(&self.actions.default_power_dbm) {
            return Err(Error::config(
                "actions.default_power_dbm",
                format!(
                    "{} is not one of the configured powers",
                    self.actions.default_power_dbm
                ),
            ));
        }
        if let Some(p) = &sc.policies {
            let n = self.bss_count();
            if p.len() != n {
                return Err(Error::config(
                    "scenario.policies",
                    format!("expected {n} entries, got {}", p.len()),
                ));
            }
        }
        if let Some(list) = &self.sweep.d_ap_ap {
            for (i, &d) in list.iter().enumerate() {
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::config(
                        format!("sweep.d_ap_ap[{i}]"),
                        "must be a non-negative distance",
                    ));
                }
            }
        }
        // Remaining range checks live with the engine's spec.
        if sc.kind != ScenarioKind::AbstractGame {
            self.to_spec()?.validate()?;
        } else if !(self.learning.lambda > 0.0 && self.learning.lambda <= 1.0) {
            return Err(Error::config("learning.lambda", "must be in (0, 1]"));
        }
        Ok(())
    }

    /// Builds the engine spec. Call on a resolved config.
    pub fn to_spec(&self) -> Result<ScenarioSpec> {
        let sc = &self.scenario;
        let mut spec = ScenarioSpec::new(sc.kind);
        spec.d_ap_ap = sc.d_ap_ap.unwrap_or(spec.d_ap_ap);
        spec.d_ap_sta = sc.d_ap_sta;
        spec.d_ap_sta_range = (sc.d_ap_sta_range[0], sc.d_ap_sta_range[1]);
        spec.num_bss = sc.num_bss;
        spec.custom_bss = sc
            .bss
            .iter()
            .map(|b| Bss {
                ap: Position::new(b.ap[0], b.ap[1]),
                sta: Position::new(b.sta[0], b.sta[1]),
            })
            .collect();
        if let (Some(c), Some(p)) = (&self.actions.cst_dbm, &self.actions.power_dbm) {
            spec.action_set = action_grid(c, p);
        }
        spec.default_action =
            Action::new(self.actions.default_cst_dbm, self.actions.default_power_dbm);
        spec.policies = sc.policies.clone().unwrap_or_else(|| vec![sc.policy]);
        spec.iterations = sc.iterations;
        spec.seed = self.seed;
        spec.num_deployments = sc.num_deployments;
        spec.radio = self.radio;
        spec.path_loss = self.path_loss;
        if let Some(t) = &self.rate_table {
            spec.rate_table = t.clone();
        }
        let l = &self.learning;
        spec.learning = LearningParams {
            lambda: l.lambda,
            eps0: l.eps0,
            omega: l.omega.unwrap_or(2.0 * spec.bss_count() as f64),
            mu: l.mu,
            global_decay: l.global_decay,
            start_from_default: l.start_from_default,
            strict_capture: l.strict_capture,
            noise_sigma_db: l.noise_sigma_db,
        };
        spec.game = self.game.clone();
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    /// SHA-256 of the resolved config with the output section reset, so the
    /// same experiment written to a different directory keeps its hash.
    pub fn hash(&self) -> Result<String> {
        let canonical = RunConfig {
            output: OutputConfig::default(),
            ..self.clone()
        };
        let digest = Sha256::digest(canonical.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}
