//! Result files. Each one carries the schema version and the resolved-config
//! hash so a trace can always be matched to the config that produced it.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::engine::{IterationRecord, ScenarioSpec};
use crate::error::{Error, Result};

pub const TRACE_SCHEMA: &str = "srsim-trace/1";
pub const SUMMARY_SCHEMA: &str = "srsim-summary/1";
pub const SWEEP_SCHEMA: &str = "srsim-sweep/1";

pub const TRACE_FILE: &str = "trace.csv";
pub const DEBUG_FILE: &str = "trace_debug.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const SWEEP_FILE: &str = "sweep.csv";

pub const TRACE_HEADER: &str = "t,bss_id,action_index,cst_dbm,power_dbm,throughput_mbps,reward";
pub const SWEEP_HEADER: &str =
    "d_ap_ap,seed,policy,deployments,mean_throughput_mbps,min_throughput_mbps";

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn comment_line(schema: &str, hash: &str) -> String {
    format!("# schema={schema} config_sha256={hash}\n")
}

/// One row per (iteration, BSS). Floats use the shortest exact representation.
pub fn render_trace(hash: &str, spec: &ScenarioSpec, records: &[IterationRecord]) -> String {
    let mut s = comment_line(TRACE_SCHEMA, hash);
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in records {
        for (n, b) in r.bss.iter().enumerate() {
            let a = spec.action_set[b.action_index];
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.t, n, b.action_index, a.cst.0, a.tx_power.0, b.throughput_mbps, b.reward
            );
        }
    }
    s
}

pub fn write_trace(
    dir: &Path,
    hash: &str,
    spec: &ScenarioSpec,
    records: &[IterationRecord],
) -> Result<()> {
    write(&dir.join(TRACE_FILE), &render_trace(hash, spec, records))
}

pub fn write_debug(dir: &Path, records: &[IterationRecord]) -> Result<()> {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).map_err(|e| Error::Serialize(e.to_string()))?);
        s.push('\n');
    }
    write(&dir.join(DEBUG_FILE), &s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    write(path, &s)
}

/// Resolved config with the output directory reset, so echoes written to
/// different directories are identical.
pub fn render_config_echo(config: &RunConfig, hash: &str) -> Result<String> {
    let mut echo = config.clone();
    echo.output.dir = crate::config::OutputConfig::default().dir;
    Ok(format!("# config_sha256={hash}\n{}", echo.to_toml()?))
}

pub fn write_config_echo(dir: &Path, config: &RunConfig, hash: &str) -> Result<()> {
    write(&dir.join(CONFIG_FILE), &render_config_echo(config, hash)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub d_ap_ap: f64,
    pub seed: u64,
    pub policy: String,
    pub deployments: usize,
    pub mean_throughput_mbps: f64,
    pub min_throughput_mbps: f64,
}

pub fn render_sweep(hash: &str, rows: &[SweepRow]) -> String {
    let mut s = comment_line(SWEEP_SCHEMA, hash);
    s.push_str(SWEEP_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.d_ap_ap,
            r.seed,
            r.policy,
            r.deployments,
            r.mean_throughput_mbps,
            r.min_throughput_mbps
        );
    }
    s
}

pub fn write_sweep(dir: &Path, hash: &str, rows: &[SweepRow]) -> Result<()> {
    write(&dir.join(SWEEP_FILE), &render_sweep(hash, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_episode, ScenarioKind};

    #[test]
    fn trace_layout() {
        let mut spec = ScenarioSpec::new(ScenarioKind::ToyStrong);
        spec.iterations = 3;
        let ep = run_episode(&spec).unwrap();
        let text = render_trace("abc", &spec, &ep.records);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema=srsim-trace/1 config_sha256=abc");
        assert_eq!(lines[1], TRACE_HEADER);
        assert_eq!(lines.len(), 2 + 3 * 2);
        assert!(lines[2].starts_with("1,0,3,-82,20,"), "{}", lines[2]);
    }
}
