//! Command-line interface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use crate::config::{parse_params, parse_regimes, Format, Output, RunConfig, Scenario, Sweep};
use crate::error::{CliError, CliResult};
use crate::output::{read_json, write};
use crate::rows::SweepRow;
use crate::scenarios::{compare, replay, run, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "hiercon", version, about = "Sweeps and simulations of hierarchical contracts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Manager paid on team net benefit and its quadratic variation.
    #[command(name = "two_level")]
    TwoLevel(RunArgs),
    /// Principal contracts every worker directly.
    Dc(RunArgs),
    /// Two-level contracting with the manager's ability spillover.
    Ability(RunArgs),
    /// Manager paid on reported profit and cost.
    Pc(RunArgs),
    /// Agents' results reported apart from the manager's own output.
    #[command(name = "separate_reporting")]
    SeparateReporting(RunArgs),
    /// Top manager over team managers over agents.
    #[command(name = "three_level")]
    ThreeLevel(RunArgs),
    /// Monte Carlo check of an optimal or explicit contract.
    Simulate(RunArgs),
    /// Row-by-row differences between two runs, A minus B.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Recompute a JSON result from the rates it records.
    Replay {
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML run manifest; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// VAR:FROM:TO:COUNT, e.g. total_workers:2:30:29.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Identical workers k,R,sigma.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Workers including the manager.
    #[arg(long)]
    pub total_workers: Option<usize>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Comma-separated list of sophisticated, linear, direct.
    #[arg(long)]
    pub regimes: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        if let Some(s) = &self.sweep {
            cfg.sweep = Some(Sweep::parse(s)?);
        }
        if let Some(p) = &self.params {
            cfg.workers.params = parse_params(p)?;
            cfg.firm = None;
        }
        if let Some(n) = self.total_workers {
            cfg.workers.total_workers = n;
        }
        if let Some(t) = self.horizon {
            cfg.horizon = t;
        }
        if let Some(r) = &self.regimes {
            cfg.regimes = parse_regimes(r)?;
        }
        if let Some(s) = self.seed {
            cfg.mc.seed = Some(s);
        }
        if let Some(p) = self.paths {
            cfg.mc.paths = Some(p);
        }
        if let Some(s) = self.steps {
            cfg.mc.steps = Some(s);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json; inferred from the file extension when absent.
    #[arg(long)]
    pub format: Option<String>,
}

impl OutArgs {
    fn apply(&self, out: &mut Output) -> CliResult<()> {
        if let Some(p) = &self.out {
            out.path = Some(p.clone());
        }
        if let Some(f) = &self.format {
            out.format = Some(f.parse::<Format>()?);
        }
        Ok(())
    }
}

/// Manifest plus flags, with `scenario` fixed by the subcommand.
pub fn resolve(scenario: Option<Scenario>, args: &RunArgs) -> CliResult<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if scenario.is_some() {
        cfg.scenario = scenario;
    }
    args.overrides.apply(&mut cfg)?;
    args.out.apply(&mut cfg.output)?;
    cfg.validate()?;
    Ok(cfg)
}

fn meta(cfg: &RunConfig, kind: &str) -> serde_json::Value {
    json!({ "config": cfg, "version": VERSION, "kind": kind })
}

fn run_scenario(scenario: Scenario, args: &RunArgs) -> CliResult<()> {
    let cfg = resolve(Some(scenario), args)?;
    match run(&cfg)? {
        Table::Sweep(rows) => write(&rows, meta(&cfg, "sweep"), &cfg.output),
        Table::Mc(rows) => write(&rows, meta(&cfg, "mc"), &cfg.output),
    }
}

#[derive(Deserialize)]
struct RunMeta {
    config: RunConfig,
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let scenario = match &cli.command {
        Command::TwoLevel(a) => (Scenario::TwoLevel, a),
        Command::Dc(a) => (Scenario::Dc, a),
        Command::Ability(a) => (Scenario::Ability, a),
        Command::Pc(a) => (Scenario::Pc, a),
        Command::SeparateReporting(a) => (Scenario::SeparateReporting, a),
        Command::ThreeLevel(a) => (Scenario::ThreeLevel, a),
        Command::Simulate(a) => (Scenario::Simulate, a),
        Command::Compare {
            config_a,
            config_b,
            overrides,
            out,
        } => {
            let load = |p: &PathBuf| {
                resolve(
                    None,
                    &RunArgs {
                        config: Some(p.clone()),
                        overrides: overrides.clone(),
                        out: OutArgs::default(),
                    },
                )
            };
            let (a, b) = (load(config_a)?, load(config_b)?);
            let rows = compare(&a, &b)?;
            let mut output = Output::default();
            out.apply(&mut output)?;
            let m = json!({ "config_a": a, "config_b": b, "version": VERSION, "kind": "compare" });
            return write(&rows, m, &output);
        }
        Command::Replay { input, out } => {
            let doc = read_json::<RunMeta, SweepRow>(input)?;
            let rows = replay(&doc.meta.config, &doc.rows)?;
            let mut output = Output::default();
            out.apply(&mut output)?;
            return write(&rows, meta(&doc.meta.config, "sweep"), &output);
        }
    };
    run_scenario(scenario.0, scenario.1)
}

/// Cap the worker pool at `HIERCON_THREADS` when set.
pub fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("HIERCON_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("HIERCON_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}
