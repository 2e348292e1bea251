//! `tempscout`: temperature sweeps, dataset statistics and temperature
//! heuristics from the command line.

mod cmd;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use tempscout_core::ErrorKind;

use crate::manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(name = "tempscout", version, about = "Find and predict the optimal softmax temperature of embedding datasets")]
struct Cli {
    /// Worker threads for sweeps and cross-validation (default: all cores).
    #[arg(long, global = true, env = "TEMPSCOUT_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "lowercase")]
pub enum Command {
    /// Generate a synthetic suite of embedding datasets.
    Gen(cmd::gen::GenArgs),
    /// Compute the statistic vector of a dataset.
    Stats(cmd::stats::StatsArgs),
    /// Grid-search the temperature of one dataset.
    Sweep(cmd::sweep::SweepArgs),
    /// Fit the temperature heuristic on sweep observations and cross-validate it.
    Fit(cmd::fit::FitArgs),
    /// Predict the temperature of a dataset with a fitted model.
    Predict(cmd::predict::PredictArgs),
    /// Collect figure data (curves, scatter, correlations) from a run directory.
    Report(cmd::report::ReportArgs),
    /// Re-run the command recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, clap::Args, Serialize, Deserialize)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    /// Write into this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Paths touched by a finished command, for its manifest.
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub artifacts: Vec<PathBuf>,
    pub manifest_name: String,
}

impl Command {
    /// Makes every path absolute so a manifest can be replayed from anywhere.
    fn absolutize(&mut self) -> Result<()> {
        match self {
            Command::Gen(a) => a.absolutize(),
            Command::Stats(a) => a.absolutize(),
            Command::Sweep(a) => a.absolutize(),
            Command::Fit(a) => a.absolutize(),
            Command::Predict(a) => a.absolutize(),
            Command::Report(a) => a.absolutize(),
            Command::Rerun(_) => Ok(()),
        }
    }

    fn set_out(&mut self, out: PathBuf) {
        match self {
            Command::Gen(a) => a.out = out,
            Command::Stats(a) => a.out = Some(out),
            Command::Sweep(a) => a.out = out,
            Command::Fit(a) => a.out = out,
            Command::Predict(a) => a.out = Some(out),
            Command::Report(a) => a.out = out,
            Command::Rerun(_) => {}
        }
    }

    fn execute(&self) -> Result<Outcome> {
        match self {
            Command::Gen(a) => cmd::gen::run(a),
            Command::Stats(a) => cmd::stats::run(a),
            Command::Sweep(a) => cmd::sweep::run(a),
            Command::Fit(a) => cmd::fit::run(a),
            Command::Predict(a) => cmd::predict::run(a),
            Command::Report(a) => cmd::report::run(a),
            Command::Rerun(_) => unreachable!("rerun is resolved before execution"),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(tempscout_core::Error::InvalidConfig("--jobs must be >= 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let mut command = match cli.command {
        Command::Rerun(r) => {
            let m = RunManifest::load(&r.manifest)?;
            let mut c = m.invocation;
            if matches!(c, Command::Rerun(_)) {
                return Err(tempscout_core::Error::InvalidConfig(
                    "a manifest cannot record a rerun".into(),
                )
                .into());
            }
            if let Some(out) = r.out {
                c.set_out(out);
            }
            c
        }
        c => c,
    };
    command.absolutize()?;
    let started = manifest::now();
    let outcome = command.execute()?;
    if let Some(dir) = &outcome.output_dir {
        let m = RunManifest::new(command.clone(), cli.jobs, &outcome, started)?;
        m.save(&dir.join(&outcome.manifest_name))?;
    }
    Ok(())
}

/// 0 success, 1 I/O, 2 configuration, 3 load, 4 numerical.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<tempscout_core::Error>() {
            return match err.kind() {
                ErrorKind::Io => 1,
                ErrorKind::Config => 2,
                ErrorKind::Load => 3,
                ErrorKind::Numerical => 4,
            };
        }
        if cause.is::<serde_json::Error>() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
