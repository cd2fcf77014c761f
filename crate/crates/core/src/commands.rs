//! Entry points behind the `run`, `sweep` and `oracle` subcommands.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::{RunConfig, TraceLevel};
use crate::engine::{
    build_deployment, run_campaign, run_episode_with, run_game, CampaignSummary, EpisodeOptions,
    GameSummary, RunSummary, ScenarioKind,
};
use crate::error::{Error, Result};
use crate::learning::PolicyKind;
use crate::mac::{brute_force_optimum, is_pure_nash, Action, Objective};
use crate::output::{self, SweepRow};
use crate::rng::{substream, STREAM_GEOMETRY};

#[derive(Debug, Clone, Serialize)]
pub struct SummaryDoc {
    pub schema: &'static str,
    pub config_sha256: String,
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub policies: Vec<PolicyKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub episode: Option<RunSummary>,
    /// Random scenarios also aggregate over `num_deployments` deployments.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub campaign: Option<CampaignSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub game: Option<GameSummary>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: SummaryDoc,
}

fn prepare_dir(config: &RunConfig) -> Result<PathBuf> {
    let dir = config.output.dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

/// Runs one episode (plus a campaign for random scenarios) and writes the
/// trace, summary and config echo into the output directory.
pub fn cmd_run(config: &RunConfig) -> Result<RunReport> {
    let config = config.clone().resolve()?;
    let hash = config.hash()?;
    let spec = config.to_spec()?;
    let dir = prepare_dir(&config)?;
    let mut files = Vec::new();

    let mut summary = SummaryDoc {
        schema: output::SUMMARY_SCHEMA,
        config_sha256: hash.clone(),
        scenario: spec.kind,
        seed: spec.seed,
        policies: spec.policies.clone(),
        episode: None,
        campaign: None,
        game: None,
    };

    if spec.kind == ScenarioKind::AbstractGame {
        summary.game = Some(run_game(&spec)?);
    } else {
        let level = config.output.trace_level;
        let ep = run_episode_with(
            &spec,
            EpisodeOptions {
                snapshots: level == TraceLevel::Debug,
            },
        )?;
        if level != TraceLevel::Summary {
            output::write_trace(&dir, &hash, &spec, &ep.records)?;
            files.push(dir.join(output::TRACE_FILE));
        }
        if level == TraceLevel::Debug {
            output::write_debug(&dir, &ep.records)?;
            files.push(dir.join(output::DEBUG_FILE));
        }
        summary.episode = Some(ep.summary);
        if spec.kind == ScenarioKind::Random {
            summary.campaign = Some(run_campaign(&spec)?);
        }
    }

    output::write_json(&dir.join(output::SUMMARY_FILE), &summary)?;
    files.push(dir.join(output::SUMMARY_FILE));
    output::write_config_echo(&dir, &config, &hash)?;
    files.push(dir.join(output::CONFIG_FILE));
    Ok(RunReport {
        dir,
        files,
        summary,
    })
}

fn sweep_axis<T: Clone>(key: &str, list: &Option<Vec<T>>, base: T) -> Result<Vec<T>> {
    match list {
        Some(v) if v.is_empty() => Err(Error::config(key, "sweep list must not be empty")),
        Some(v) => Ok(v.clone()),
        None => Ok(vec![base]),
    }
}

/// One campaign per point of the cross product of the configured sweep lists.
pub fn cmd_sweep(config: &RunConfig) -> Result<Vec<SweepRow>> {
    let config = config.clone().resolve()?;
    if config.sweep.is_empty() {
        return Err(Error::config(
            "sweep",
            "no sweep variable given (d_ap_ap, seeds or policies)",
        ));
    }
    if config.scenario.kind == ScenarioKind::AbstractGame {
        return Err(Error::config(
            "scenario.kind",
            "sweeps need a radio scenario",
        ));
    }
    let base = config.to_spec()?;
    let distances = sweep_axis("sweep.d_ap_ap", &config.sweep.d_ap_ap, base.d_ap_ap)?;
    let seeds = sweep_axis("sweep.seeds", &config.sweep.seeds, base.seed)?;
    let policies = sweep_axis("sweep.policies", &config.sweep.policies, base.policies[0])?;
    let per_bss = config.sweep.policies.is_none();

    let mut rows = Vec::with_capacity(distances.len() * seeds.len() * policies.len());
    for &d in &distances {
        for &seed in &seeds {
            for &policy in &policies {
                let mut spec = base.clone();
                spec.d_ap_ap = d;
                spec.seed = seed;
                if !per_bss {
                    spec.policies = vec![policy];
                }
                let c = run_campaign(&spec)?;
                rows.push(SweepRow {
                    d_ap_ap: d,
                    seed,
                    policy: if per_bss && spec.policies.len() > 1 {
                        spec.policies
                            .iter()
                            .map(|p| p.name())
                            .collect::<Vec<_>>()
                            .join("+")
                    } else {
                        policy.name().to_string()
                    },
                    deployments: c.deployments,
                    mean_throughput_mbps: c.mean_throughput_mbps,
                    min_throughput_mbps: c.min_throughput_mbps,
                });
            }
        }
    }
    let hash = config.hash()?;
    let dir = prepare_dir(&config)?;
    output::write_sweep(&dir, &hash, &rows)?;
    output::write_config_echo(&dir, &config, &hash)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub profile: Vec<usize>,
    pub actions: Vec<Action>,
    pub sum_throughput_mbps: f64,
    pub min_throughput_mbps: f64,
    pub pure_nash: bool,
}

/// Exhaustive sum-throughput optimum of the configured deployment.
pub fn cmd_oracle(config: &RunConfig) -> Result<OracleReport> {
    let config = config.clone().resolve()?;
    let spec = config.to_spec()?;
    let dep = build_deployment(&spec, &mut substream(spec.seed, STREAM_GEOMETRY))?;
    let opt = brute_force_optimum(&dep, &spec.action_set, Objective::Sum)?;
    Ok(OracleReport {
        actions: opt.profile.iter().map(|&i| spec.action_set[i]).collect(),
        pure_nash: is_pure_nash(&dep, &spec.action_set, &opt.profile)?,
        sum_throughput_mbps: opt.outcome.total_throughput(),
        min_throughput_mbps: opt.outcome.min_throughput(),
        profile: opt.profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    #[test]
    fn oracle_on_toys() {
        let strong = cmd_oracle(&parse_config_str("").unwrap()).unwrap();
        assert_eq!(strong.actions, vec![Action::new(-72.0, 20.0); 2]);
        assert!(strong.pure_nash);
        let weak =
            cmd_oracle(&parse_config_str("[scenario]\nkind = \"toy_weak\"\n").unwrap()).unwrap();
        assert_eq!(weak.actions, vec![Action::new(-72.0, 10.0); 2]);
    }

    #[test]
    fn empty_sweep_list_is_error() {
        let c = parse_config_str("[sweep]\nd_ap_ap = []\n").unwrap();
        let err = cmd_sweep(&c).unwrap_err();
        assert!(
            matches!(&err, Error::Config { key, .. } if key == "sweep.d_ap_ap"),
            "{err}"
        );
        assert!(cmd_sweep(&parse_config_str("").unwrap()).is_err());
    }
}
