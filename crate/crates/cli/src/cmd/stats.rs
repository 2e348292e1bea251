use std::path::PathBuf;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use tempscout_core::dataset::load_auto;
use tempscout_core::stats::{extract_stats, StatVector, StatsConfig};
use tempscout_core::SCHEMA_VERSION;

use crate::output::{absolute, artifact_key, create_dir, to_json, write_text};
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize, Deserialize)]
pub struct StatsArgs {
    /// EMB1 directory or CSV file.
    pub dataset: PathBuf,
    /// L2-normalize rows before computing the statistics.
    #[arg(long)]
    pub normalize_first: bool,
    /// Seed of the normality and silhouette subsamples.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5000)]
    pub normality_max_n: usize,
    #[arg(long, default_value_t = 5000)]
    pub silhouette_max_n: usize,
    /// Also write `<dataset>__<extractor>.stats.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl StatsArgs {
    pub fn absolutize(&mut self) -> Result<()> {
        self.dataset = absolute(&self.dataset)?;
        if let Some(o) = &self.out {
            self.out = Some(absolute(o)?);
        }
        Ok(())
    }

    pub fn config(&self) -> StatsConfig {
        StatsConfig {
            normality_max_n: self.normality_max_n,
            silhouette_max_n: self.silhouette_max_n,
            seed: self.seed,
            normalize_first: self.normalize_first,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsOutput {
    pub schema_version: u32,
    pub dataset_name: String,
    pub extractor: String,
    pub config: StatsConfig,
    pub stats: StatVector,
    pub warnings: Vec<String>,
}

pub fn run(a: &StatsArgs) -> Result<Outcome> {
    let ds = load_auto(&a.dataset)?;
    let config = a.config();
    let report = extract_stats(&ds, &config)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let out = StatsOutput {
        schema_version: SCHEMA_VERSION,
        dataset_name: ds.name().to_string(),
        extractor: ds.extractor().to_string(),
        config,
        stats: report.stats,
        warnings: report.warnings,
    };
    let text = to_json(&out)? + "\n";
    print!("{text}");
    let mut artifacts = Vec::new();
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        let path = dir.join(format!("{}.stats.json", artifact_key(ds.name(), ds.extractor())));
        write_text(&path, &text)?;
        artifacts.push(path);
    }
    Ok(Outcome {
        inputs: vec![a.dataset.clone()],
        output_dir: a.out.clone(),
        artifacts,
        manifest_name: format!("{}.stats.manifest.json", artifact_key(ds.name(), ds.extractor())),
    })
}
