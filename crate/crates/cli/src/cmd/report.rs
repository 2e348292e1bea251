use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use tempscout_core::heuristic::{CorrelationReport, CvReport};
use tempscout_core::sweep::read_sweep;
use tempscout_core::Error;

use super::fit::find_observations;
use crate::output::{absolute, create_dir, write_text};
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize, Deserialize)]
pub struct ReportArgs {
    /// Directory holding sweep outputs and one `fit` output.
    pub run_dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

impl ReportArgs {
    pub fn absolutize(&mut self) -> Result<()> {
        self.run_dir = absolute(&self.run_dir)?;
        self.out = absolute(&self.out)?;
        Ok(())
    }
}

/// The single file called `name` under `dir`.
fn find_one(dir: &Path, name: &str) -> Result<PathBuf> {
    let hits: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file() && e.file_name() == name)
        .map(|e| e.into_path())
        .collect();
    match hits.len() {
        0 => Err(Error::InvalidConfig(format!("no {name} under {}", dir.display())).into()),
        1 => Ok(hits.into_iter().next().unwrap()),
        n => Err(Error::InvalidConfig(format!(
            "{n} files named {name} under {}; point at a single run",
            dir.display()
        ))
        .into()),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).with_context(|| format!("reading {}", path.display()))
}

pub fn run(a: &ReportArgs) -> Result<Outcome> {
    let observations = find_observations(&a.run_dir)?;
    if observations.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no sweep outputs under {}",
            a.run_dir.display()
        ))
        .into());
    }
    let cv_path = find_one(&a.run_dir, "cv_report.json")?;
    let corr_path = find_one(&a.run_dir, "correlation_report.json")?;
    let cv: CvReport = read_json(&cv_path)?;
    let corr: CorrelationReport = read_json(&corr_path)?;

    let mut curves = String::from("dataset,extractor,alpha,acc_mean,acc_std,n,diverged,optimal\n");
    for (path, obs) in &observations {
        let csv = path.parent().unwrap_or(Path::new(".")).join(&obs.curve);
        let sr = read_sweep(&csv)?;
        for p in &sr.per_alpha {
            curves.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                sr.dataset_name,
                sr.extractor,
                p.alpha,
                p.acc_mean,
                p.acc_std,
                p.n_repeats,
                p.any_diverged,
                p.alpha == sr.optimal_alpha
            ));
        }
    }

    let mut bars = String::from("name,abs_r,pearson_r,p_value,constant\n");
    for e in &corr.entries {
        bars.push_str(&format!(
            "{},{},{},{},{}\n",
            e.name, e.abs_r, e.pearson_r, e.p_value, e.constant
        ));
    }

    create_dir(&a.out)?;
    let artifacts = vec![
        a.out.join("curves.csv"),
        a.out.join("scatter.csv"),
        a.out.join("correlations.csv"),
    ];
    write_text(&artifacts[0], &curves)?;
    write_text(&artifacts[1], &cv.predictions_csv())?;
    write_text(&artifacts[2], &bars)?;
    println!("wrote {} figure-data files to {}", artifacts.len(), a.out.display());

    let mut inputs: Vec<PathBuf> = observations.into_iter().map(|(p, _)| p).collect();
    inputs.push(cv_path);
    inputs.push(corr_path);
    Ok(Outcome {
        inputs,
        output_dir: Some(a.out.clone()),
        artifacts,
        manifest_name: "report.manifest.json".into(),
    })
}
