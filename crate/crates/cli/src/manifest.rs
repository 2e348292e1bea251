use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use tempscout_core::SCHEMA_VERSION;

use crate::{Command, Outcome};

/// Everything needed to reproduce a command's outputs.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub invocation: Command,
    pub jobs: Option<usize>,
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    /// Produced files, relative to `output_dir`.
    pub artifacts: Vec<PathBuf>,
    pub started_at: String,
    pub finished_at: String,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(invocation: Command, jobs: Option<usize>, o: &Outcome, started_at: String) -> Result<Self> {
        let output_dir = o.output_dir.clone().context("manifest without an output directory")?;
        let artifacts = o
            .artifacts
            .iter()
            .map(|p| p.strip_prefix(&output_dir).unwrap_or(p).to_path_buf())
            .collect();
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            invocation,
            jobs,
            inputs: o.inputs.clone(),
            output_dir,
            artifacts,
            started_at,
            finished_at: now(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::output::write_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| tempscout_core::Error::io(path, e))?;
        let m: Self = serde_json::from_str(&text)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(tempscout_core::Error::InvalidDataset(format!(
                "manifest {} has schema version {}, expected {SCHEMA_VERSION}",
                path.display(),
                m.schema_version
            ))
            .into());
        }
        Ok(m)
    }
}
