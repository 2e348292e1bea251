use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use tempscout_core::heuristic::{
    correlation_report, fit_heuristic_with, logo_cv, FeatureSet, FitOptions, Observation,
    ObservationTable,
};
use tempscout_core::Error;

use super::{ModelFile, ObservationFile, OBSERVATION_SUFFIX};
use crate::output::{absolute, create_dir, write_json, write_text};
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// Directory searched recursively for sweep observation records.
    pub observations: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// `best`, `k-best:K`, `all` or a comma-separated list of statistics.
    #[arg(long, default_value = "all")]
    pub features: String,
    /// Allow fewer rows than features + 1 and constant features
    /// (minimum-norm least squares).
    #[arg(long)]
    pub min_norm: bool,
}

impl FitArgs {
    pub fn absolutize(&mut self) -> Result<()> {
        self.observations = absolute(&self.observations)?;
        self.out = absolute(&self.out)?;
        Ok(())
    }
}

/// Observation records under `dir`, in path order.
pub fn find_observations(dir: &Path) -> Result<Vec<(PathBuf, ObservationFile)>> {
    if !dir.is_dir() {
        return Err(Error::InvalidConfig(format!("{} is not a directory", dir.display())).into());
    }
    let mut found = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.with_context(|| format!("scanning {}", dir.display()))?;
        let name = entry.file_name().to_string_lossy();
        if entry.file_type().is_file() && name.ends_with(OBSERVATION_SUFFIX) {
            let path = entry.into_path();
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let obs: ObservationFile = serde_json::from_str(&text)
                .with_context(|| format!("reading {}", path.display()))?;
            found.push((path, obs));
        }
    }
    Ok(found)
}

pub fn run(a: &FitArgs) -> Result<Outcome> {
    let features: FeatureSet = a.features.parse()?;
    let found = find_observations(&a.observations)?;
    if found.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no *{OBSERVATION_SUFFIX} files under {}",
            a.observations.display()
        ))
        .into());
    }
    let stats_config = found[0].1.stats_config.clone();
    if let Some((p, _)) = found.iter().find(|(_, o)| o.stats_config != stats_config) {
        return Err(Error::InvalidConfig(format!(
            "{} was computed with different statistics settings than {}",
            p.display(),
            found[0].0.display()
        ))
        .into());
    }
    let lo = found.iter().map(|(_, o)| o.alpha_range.0).fold(f64::INFINITY, f64::min);
    let hi = found.iter().map(|(_, o)| o.alpha_range.1).fold(f64::NEG_INFINITY, f64::max);
    let rows = found
        .iter()
        .map(|(_, o)| Observation {
            dataset_name: o.dataset_name.clone(),
            extractor: o.extractor.clone(),
            stats: o.stats,
            optimal_alpha: o.optimal_alpha,
        })
        .collect();
    let table = ObservationTable::new(rows, (lo, hi))?;
    if table.groups().len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "cross-validation needs at least 2 datasets, found {}",
            table.groups().len()
        ))
        .into());
    }

    let report = correlation_report(&table)?;
    let (names, warnings) = features.resolve(&report)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    let opts = FitOptions { min_norm: a.min_norm };
    let model = fit_heuristic_with(&table, &names, opts)?;
    for w in &model.fit.warnings {
        log::warn!("{w}");
    }
    let cv = logo_cv(&table, &names, opts)?;

    create_dir(&a.out)?;
    let out = |name: &str| a.out.join(name);
    let artifacts = vec![
        out("observations.json"),
        out("correlation_report.json"),
        out("correlations.csv"),
        out("model.json"),
        out("cv_report.json"),
        out("cv_predictions.csv"),
    ];
    table.save(&artifacts[0])?;
    write_json(&artifacts[1], &report)?;
    write_text(&artifacts[2], &report.to_csv())?;
    write_json(
        &artifacts[3],
        &ModelFile {
            model,
            stats_config,
        },
    )?;
    write_json(&artifacts[4], &cv)?;
    write_text(&artifacts[5], &cv.predictions_csv())?;

    let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |r| format!("{r:.4}"));
    println!("features ({}): {}", names.len(), names.join(","));
    println!(
        "logo-cv: {} folds, median r {}, mean r {}, pooled r {} (p {})",
        cv.folds.len(),
        fmt(cv.median_r),
        fmt(cv.mean_r),
        fmt(cv.pooled_r),
        fmt(cv.pooled_p_value)
    );
    Ok(Outcome {
        inputs: found.into_iter().map(|(p, _)| p).collect(),
        output_dir: Some(a.out.clone()),
        artifacts,
        manifest_name: "fit.manifest.json".into(),
    })
}
