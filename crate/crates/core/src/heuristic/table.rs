use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{StatVector, STAT_NAMES};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub dataset_name: String,
    pub extractor: String,
    pub stats: StatVector,
    pub optimal_alpha: f64,
}

/// One row per (dataset, extractor) pair, with the sweep grid range the
/// optimal temperatures were searched over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationTable {
    rows: Vec<Observation>,
    alpha_range: (f64, f64),
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    schema_version: u32,
    alpha_range: (f64, f64),
    rows: Vec<Observation>,
}

impl ObservationTable {
    pub fn new(rows: Vec<Observation>, alpha_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = alpha_range;
        if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi) {
            return Err(Error::InvalidConfig(format!(
                "invalid temperature range ({lo}, {hi})"
            )));
        }
        let mut seen = BTreeSet::new();
        for row in &rows {
            if !seen.insert((row.dataset_name.as_str(), row.extractor.as_str())) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate observation for dataset '{}' and extractor '{}'",
                    row.dataset_name, row.extractor
                )));
            }
            if !(lo..=hi).contains(&row.optimal_alpha) {
                return Err(Error::InvalidDataset(format!(
                    "optimal alpha {} of '{}/{}' lies outside the grid range [{lo}, {hi}]",
                    row.optimal_alpha, row.dataset_name, row.extractor
                )));
            }
            if let Some((name, _)) = row.stats.entries().into_iter().find(|(_, v)| !v.is_finite()) {
                return Err(Error::Numerical(format!(
                    "statistic {name} of '{}/{}' is not finite",
                    row.dataset_name, row.extractor
                )));
            }
        }
        Ok(Self { rows, alpha_range })
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn alpha_range(&self) -> (f64, f64) {
        self.alpha_range
    }

    /// Distinct dataset names, sorted.
    pub fn groups(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.rows.iter().map(|r| r.dataset_name.as_str()).collect();
        set.into_iter().map(str::to_string).collect()
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        if !STAT_NAMES.contains(&name) {
            return Err(Error::UnknownStatistic(name.to_string()));
        }
        Ok(self.rows.iter().map(|r| r.stats.get(name).unwrap()).collect())
    }

    pub fn targets(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.optimal_alpha).collect()
    }

    /// `(training side, held-out side)` for one dataset group.
    pub(crate) fn split_group(&self, group: &str) -> (Self, Self) {
        let (held, rest): (Vec<_>, Vec<_>) = self
            .rows
            .iter()
            .cloned()
            .partition(|r| r.dataset_name == group);
        (
            Self {
                rows: rest,
                alpha_range: self.alpha_range,
            },
            Self {
                rows: held,
                alpha_range: self.alpha_range,
            },
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = TableFile {
            schema_version: SCHEMA_VERSION,
            alpha_range: self.alpha_range,
            rows: self.rows.clone(),
        };
        let text = serde_json::to_string_pretty(&file)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: TableFile = serde_json::from_str(&text)?;
        Self::new(file.rows, file.alpha_range)
    }
}
