use std::path::PathBuf;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use tempscout_core::dataset::load_auto;
use tempscout_core::heuristic::{predict_temperature, HeuristicModel};
use tempscout_core::stats::{extract_stats, StatVector};
use tempscout_core::{Error, SCHEMA_VERSION};

use super::ModelFile;
use crate::output::{absolute, artifact_key, create_dir, to_json, write_text};
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize, Deserialize)]
pub struct PredictArgs {
    /// `model.json` written by `fit`.
    pub model: PathBuf,
    /// EMB1 directory or CSV file.
    pub dataset: PathBuf,
    /// Also write `<dataset>__<extractor>.prediction.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl PredictArgs {
    pub fn absolutize(&mut self) -> Result<()> {
        self.model = absolute(&self.model)?;
        self.dataset = absolute(&self.dataset)?;
        if let Some(o) = &self.out {
            self.out = Some(absolute(o)?);
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PredictionOutput {
    pub schema_version: u32,
    pub dataset_name: String,
    pub extractor: String,
    /// Recommended inverse temperature α, clamped into the model's range.
    pub alpha: f64,
    /// The same recommendation as a temperature T = 1/α.
    pub temperature: f64,
    pub raw_alpha: f64,
    pub clamped: bool,
    pub stats: StatVector,
}

pub fn run(a: &PredictArgs) -> Result<Outcome> {
    // Validates the model fields; the statistics settings sit alongside them.
    let model = HeuristicModel::load(&a.model)?;
    let text = std::fs::read_to_string(&a.model).map_err(|e| Error::io(&a.model, e))?;
    let file: ModelFile = serde_json::from_str(&text)?;

    let ds = load_auto(&a.dataset)?;
    let report = extract_stats(&ds, &file.stats_config)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let raw_alpha = model.predict_raw(&report.stats)?;
    let alpha = predict_temperature(&model, &report.stats)?;
    let out = PredictionOutput {
        schema_version: SCHEMA_VERSION,
        dataset_name: ds.name().to_string(),
        extractor: ds.extractor().to_string(),
        alpha,
        temperature: 1.0 / alpha,
        raw_alpha,
        clamped: alpha != raw_alpha,
        stats: report.stats,
    };
    let json = to_json(&out)? + "\n";
    print!("{json}");
    let key = artifact_key(ds.name(), ds.extractor());
    let mut artifacts = Vec::new();
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        let path = dir.join(format!("{key}.prediction.json"));
        write_text(&path, &json)?;
        artifacts.push(path);
    }
    Ok(Outcome {
        inputs: vec![a.model.clone(), a.dataset.clone()],
        output_dir: a.out.clone(),
        artifacts,
        manifest_name: format!("{key}.predict.manifest.json"),
    })
}
