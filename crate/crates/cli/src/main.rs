//! `srsim` command-line tool.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use srsim::commands::{cmd_oracle, cmd_run, cmd_sweep};
use srsim::config::{parse_config, Overrides, RunConfig, TraceLevel};
use srsim::engine::ScenarioKind;
use srsim::learning::PolicyKind;

#[derive(Parser)]
#[command(
    name = "srsim",
    version,
    about = "Spatial-reuse learning simulator for 802.11 BSSs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one episode and write trace, summary and config echo.
    Run(Common),
    /// Run a campaign per point of the [sweep] cross product.
    Sweep(Common),
    /// Print the throughput-optimal joint profile of the configured deployment.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; reference defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// static, eps_greedy or regret_matching (applies to every BSS).
    #[arg(long)]
    policy: Option<PolicyKind>,
    /// toy_strong, toy_weak, random, custom or abstract_game.
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// summary, full or debug.
    #[arg(long)]
    trace_level: Option<TraceLevel>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => parse_config(p).with_context(|| format!("loading {}", p.display()))?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            seed: self.seed,
            policy: self.policy,
            scenario: self.scenario,
            out: self.out.clone(),
            trace_level: self.trace_level,
        });
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let report = cmd_run(&c.load()?)?;
            if let Some(s) = &report.summary.episode {
                println!(
                    "mean {:.3} Mbps, min BSS {:.3} Mbps, final profile {:?}",
                    s.mean_throughput_mbps, s.min_bss_throughput_mbps, s.final_profile
                );
            }
            if let Some(c) = &report.summary.campaign {
                println!(
                    "campaign over {} deployments: mean {:.3} Mbps, min {:.3} Mbps",
                    c.deployments, c.mean_throughput_mbps, c.min_throughput_mbps
                );
            }
            if let Some(g) = &report.summary.game {
                println!(
                    "avg internal regret {:?}, CE violation {:.4}",
                    g.avg_internal_regret, g.ce_violation
                );
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Sweep(c) => {
            let rows = cmd_sweep(&c.load()?)?;
            println!(
                "{:>8} {:>6} {:>16} {:>10} {:>10}",
                "d_ap_ap", "seed", "policy", "mean", "min"
            );
            for r in rows {
                println!(
                    "{:>8} {:>6} {:>16} {:>10.3} {:>10.3}",
                    r.d_ap_ap, r.seed, r.policy, r.mean_throughput_mbps, r.min_throughput_mbps
                );
            }
        }
        Command::Oracle(c) => {
            let o = cmd_oracle(&c.load()?)?;
            for (n, (i, a)) in o.profile.iter().zip(&o.actions).enumerate() {
                println!(
                    "bss {n}: action {i} (cst {} dBm, power {} dBm)",
                    a.cst.0, a.tx_power.0
                );
            }
            println!("sum throughput {:.3} Mbps", o.sum_throughput_mbps);
            println!("min throughput {:.3} Mbps", o.min_throughput_mbps);
            println!("pure nash equilibrium: {}", o.pure_nash);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
