//! Command-line front end: configs, simulation, regime classification,
//! verification suites and figure data.

pub mod classify;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod simulate;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tumor_immune_core::Preset;

use config::{Resolved, RunConfig};
use error::{CliError, Result};
use figures::Figure;
use output::OutDir;
use verify::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "tumor-immune",
    version,
    about = "Stochastic tumor-immune model toolkit"
)]
pub struct Cli {
    /// Worker threads for ensemble runs.
    #[arg(long, global = true, env = "TUMOR_IMMUNE_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Parameter preset, overriding the config's.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Master seed, overriding the config's.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, overriding the config's.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one path; writes path.csv and summary.json.
    Simulate(Common),
    /// Print the regime report.
    Classify(Common),
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Export plot-ready CSVs.
    Figures {
        #[arg(long, value_enum)]
        which: Figure,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    Preset::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
        format!("unknown preset `{s}`, expected one of {}", names.join(", "))
    })
}

impl Common {
    /// Load the config file, if any, then apply flag overrides.
    pub fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if self.preset.is_some() {
            cfg.preset = self.preset;
        }
        if self.seed.is_some() {
            cfg.ensemble.seed = self.seed;
        }
        if self.out.is_some() {
            cfg.outputs.clone_from(&self.out);
        }
        Ok(cfg)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        self.load()?.resolve()
    }
}

/// Print to stdout, tolerating a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn json<S: serde::Serialize>(v: &S) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

/// Run a parsed command and return the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(c) => {
            let r = c.resolve()?;
            let s = simulate::run(&r)?;
            emit(&json(&s));
            Ok(0)
        }
        Command::Classify(c) => {
            let r = c.resolve()?;
            let report = classify::run(&r);
            if c.out.is_some() || c.config.is_some() {
                OutDir::create(&r.out)?.write_json("classify.json", &report)?;
            }
            emit(&json(&report));
            Ok(0)
        }
        Command::Verify { suite, common } => {
            let cfg = common.load()?;
            let (v, out) = if suite == Suite::Order {
                let out = cfg.outputs.clone().unwrap_or_else(|| PathBuf::from("out"));
                (verify::run_order(&cfg)?, out)
            } else {
                let r = cfg.resolve()?;
                (verify::run(&r, suite)?, r.out)
            };
            let lines: Vec<String> = v
                .assertions
                .iter()
                .map(|a| {
                    let tag = if a.passed { "PASS" } else { "FAIL" };
                    format!(
                        "{tag} {}: measured {} (slack {})",
                        a.name, a.measured, a.slack
                    )
                })
                .collect();
            emit(&lines.join("\n"));
            OutDir::create(&out)?.write_json(&format!("verify_{}.json", suite.name()), &v)?;
            Ok(if v.passed { 0 } else { 1 })
        }
        Command::Figures { which, common } => {
            let r = common.resolve()?;
            let m = figures::run(&r, which)?;
            let names: Vec<String> = m.files.iter().map(|f| f.display().to_string()).collect();
            emit(&names.join("\n"));
            Ok(0)
        }
    }
}
