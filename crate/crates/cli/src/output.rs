use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;
use tempscout_core::Error;

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_text(path, &(text + "\n"))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).map_err(|e| Error::io(path, e).into())
}

/// File-name-safe form of a dataset name.
pub fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Base name shared by all artifacts of one (dataset, extractor) pair.
pub fn artifact_key(dataset: &str, extractor: &str) -> String {
    format!("{}__{}", sanitize(dataset), sanitize(extractor))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_file_safe() {
        assert_eq!(artifact_key("a/b", "d32 x"), "a_b__d32_x");
        assert_eq!(sanitize("tau2.5-mu1"), "tau2.5-mu1");
    }
}
