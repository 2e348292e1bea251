use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use tempscout_core::dataset::{save_dataset, Format};
use tempscout_core::synth::{generate_suite, SynthGrid, SynthSpec};
use tempscout_core::{seeds, Error, SCHEMA_VERSION};

use crate::output::{absolute, artifact_key, create_dir, write_json};
use crate::Outcome;

#[derive(Debug, Clone, clap::Args, Serialize, Deserialize)]
pub struct GenArgs {
    /// JSON file holding a list of specs or a grid of spec parameters.
    pub spec_file: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Reseed every spec from this base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write CSV files instead of EMB1 directories.
    #[arg(long)]
    pub csv: bool,
}

impl GenArgs {
    pub fn absolutize(&mut self) -> Result<()> {
        self.spec_file = absolute(&self.spec_file)?;
        self.out = absolute(&self.out)?;
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpecFile {
    List(Vec<SynthSpec>),
    Grid(SynthGrid),
}

#[derive(Serialize)]
struct SuiteEntry {
    dataset_name: String,
    extractor: String,
    path: String,
    spec: SynthSpec,
}

#[derive(Serialize)]
struct SuiteIndex {
    schema_version: u32,
    datasets: Vec<SuiteEntry>,
}

pub fn run(a: &GenArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.spec_file).map_err(|e| Error::io(&a.spec_file, e))?;
    let parsed: SpecFile = serde_json::from_str(&text).map_err(|e| {
        Error::InvalidConfig(format!(
            "{} is neither a list of specs nor a spec grid: {e}",
            a.spec_file.display()
        ))
    })?;
    let mut specs = match parsed {
        SpecFile::List(s) => s,
        SpecFile::Grid(g) => g.specs(),
    };
    if let Some(seed) = a.seed {
        for s in &mut specs {
            s.seed = seeds::derive(seed, &format!("{}/{}", s.dataset_name(), s.extractor_name()));
        }
    }
    let suite = generate_suite(&specs)?;

    create_dir(&a.out)?;
    let mut artifacts = Vec::new();
    let mut entries = Vec::new();
    for (ds, spec) in suite.iter().zip(specs) {
        let key = artifact_key(ds.name(), ds.extractor());
        let (rel, format) = if a.csv {
            (format!("{key}.csv"), Format::Csv)
        } else {
            (key, Format::Binary)
        };
        let path = a.out.join(&rel);
        save_dataset(ds, &path, format).with_context(|| format!("writing {}", path.display()))?;
        artifacts.push(path);
        entries.push(SuiteEntry {
            dataset_name: ds.name().to_string(),
            extractor: ds.extractor().to_string(),
            path: rel,
            spec,
        });
    }
    let index = a.out.join("suite.json");
    write_json(
        &index,
        &SuiteIndex {
            schema_version: SCHEMA_VERSION,
            datasets: entries,
        },
    )?;
    artifacts.push(index);
    println!("wrote {} datasets to {}", suite.len(), a.out.display());
    Ok(Outcome {
        inputs: vec![a.spec_file.clone()],
        output_dir: Some(a.out.clone()),
        artifacts,
        manifest_name: "gen.manifest.json".into(),
    })
}
