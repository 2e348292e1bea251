use std::path::PathBuf;

use anyhow::Result;
use clap::ArgAction;
use serde::{Deserialize, Serialize};
use tempscout_core::classifier::{OptimizerKind, TrainConfig};
use tempscout_core::dataset::{load_auto, stratified_split, DEFAULT_SPLIT_RATIO};
use tempscout_core::stats::{extract_stats, StatsConfig};
use tempscout_core::sweep::{emit_curve, run_sweep, TemperatureGrid};
use tempscout_core::SCHEMA_VERSION;

use super::{ObservationFile, OBSERVATION_SUFFIX};
use crate::output::{absolute, artifact_key, create_dir, write_json};
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// EMB1 directory or CSV file.
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Grid as `start:end:step`, end inclusive.
    #[arg(long, default_value = "5:250:5")]
    pub grid: String,
    /// Do not prepend α = 1 to the grid.
    #[arg(long)]
    pub no_default_one: bool,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 2048)]
    pub batch_size: usize,
    /// Training runs per grid value.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, default_value = "sgd")]
    pub optimizer: OptimizerKind,
    /// Divide the cross-entropy by α.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub rescaled: bool,
    /// Learning rate (default: 0.1 for SGD, 0.001 for Adam).
    #[arg(long)]
    pub lr: Option<f64>,
    /// Base seed of the split, initialization, shuffling and subsampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_SPLIT_RATIO)]
    pub split_ratio: f64,
    /// L2-normalize rows before computing the recorded statistics, which
    /// are taken on the training split.
    #[arg(long)]
    pub normalize_first: bool,
}

impl SweepArgs {
    pub fn absolutize(&mut self) -> Result<()> {
        self.dataset = absolute(&self.dataset)?;
        self.out = absolute(&self.out)?;
        Ok(())
    }
}

pub fn run(a: &SweepArgs) -> Result<Outcome> {
    let grid = TemperatureGrid::parse(&a.grid, !a.no_default_one)?;
    let mut cfg = TrainConfig::new(a.optimizer);
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch_size;
    cfg.rescaled_loss = a.rescaled;
    cfg.seed = a.seed;
    if let Some(lr) = a.lr {
        cfg.lr = lr;
    }
    cfg.validate()?;

    let ds = load_auto(&a.dataset)?;
    let split = stratified_split(&ds, a.split_ratio, a.seed)?;
    let sr = run_sweep(&split, &grid, &cfg, a.repeats)?;
    if sr.per_alpha.iter().any(|p| p.any_diverged) {
        log::warn!("{} / {}: some runs diverged", ds.name(), ds.extractor());
    }

    let stats_config = StatsConfig {
        seed: a.seed,
        normalize_first: a.normalize_first,
        ..StatsConfig::default()
    };
    // Statistics describe the training embeddings the classifier sees.
    let report = extract_stats(&split.train, &stats_config)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }

    create_dir(&a.out)?;
    let key = artifact_key(ds.name(), ds.extractor());
    let curve = a.out.join(format!("{key}.csv"));
    emit_curve(&sr, &curve)?;
    let obs_path = a.out.join(format!("{key}{OBSERVATION_SUFFIX}"));
    write_json(
        &obs_path,
        &ObservationFile {
            schema_version: SCHEMA_VERSION,
            dataset_name: ds.name().to_string(),
            extractor: ds.extractor().to_string(),
            optimal_alpha: sr.optimal_alpha,
            alpha_range: (grid.min(), grid.max()),
            curve: format!("{key}.csv"),
            stats_config,
            stats: report.stats,
            stats_warnings: report.warnings,
        },
    )?;
    println!(
        "{} {} optimal_alpha={} best_acc={:.4}",
        ds.name(),
        ds.extractor(),
        sr.optimal_alpha,
        sr.per_alpha.iter().map(|p| p.acc_mean).fold(0.0, f64::max)
    );
    Ok(Outcome {
        inputs: vec![a.dataset.clone()],
        output_dir: Some(a.out.clone()),
        artifacts: vec![curve.clone(), curve.with_extension("json"), obs_path],
        manifest_name: format!("{key}.sweep.manifest.json"),
    })
}
