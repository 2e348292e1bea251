//! Learning a temperature heuristic from dataset statistics: correlation
//! ranking, least-squares fitting, leave-one-dataset-out validation and
//! prediction.

mod cv;
mod fit;
mod pearson;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::STAT_NAMES;

pub use cv::{logo_cv, CvReport, FoldResult, HeldOutPrediction};
pub use fit::{
    fit_heuristic, fit_heuristic_with, predict_temperature, FitMetadata, FitOptions,
    HeuristicModel, Standardization,
};
pub use pearson::{p_value, pearson, Correlation};
pub use table::{Observation, ObservationTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub name: String,
    pub pearson_r: f64,
    pub abs_r: f64,
    pub p_value: f64,
    /// The column is constant across the table; r and p are placeholders.
    pub constant: bool,
}

/// Correlation of every statistic with the optimal α, sorted by |r|
/// descending (ties keep the statistic order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub schema_version: u32,
    pub n_rows: usize,
    pub entries: Vec<CorrelationEntry>,
}

impl CorrelationReport {
    pub fn get(&self, name: &str) -> Option<&CorrelationEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// CSV with columns `name,pearson_r,abs_r,p_value,constant`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,pearson_r,abs_r,p_value,constant\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.name, e.pearson_r, e.abs_r, e.p_value, e.constant
            ));
        }
        out
    }
}

pub fn correlation_report(tbl: &ObservationTable) -> Result<CorrelationReport> {
    if tbl.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "a correlation report needs at least 3 observations, got {}",
            tbl.len()
        )));
    }
    let y = tbl.targets();
    let mut entries = Vec::with_capacity(STAT_NAMES.len());
    for name in STAT_NAMES {
        let x = tbl.column(name)?;
        let entry = match pearson(&x, &y) {
            Ok(c) => CorrelationEntry {
                name: name.to_string(),
                pearson_r: c.r,
                abs_r: c.r.abs(),
                p_value: c.p,
                constant: false,
            },
            Err(Error::ZeroVariance(_)) => CorrelationEntry {
                name: name.to_string(),
                pearson_r: 0.0,
                abs_r: 0.0,
                p_value: 1.0,
                constant: true,
            },
            Err(e) => return Err(e),
        };
        entries.push(entry);
    }
    // Stable sort keeps the fixed statistic order among equal |r|.
    entries.sort_by(|a, b| b.abs_r.total_cmp(&a.abs_r));
    Ok(CorrelationReport {
        schema_version: crate::SCHEMA_VERSION,
        n_rows: tbl.len(),
        entries,
    })
}

/// The `k` statistics with the largest |r|.
pub fn select_features(report: &CorrelationReport, k: usize) -> Result<Vec<String>> {
    if k == 0 || k > report.entries.len() {
        return Err(Error::InvalidConfig(format!(
            "cannot select {k} of {} statistics",
            report.entries.len()
        )));
    }
    Ok(report.entries[..k].iter().map(|e| e.name.clone()).collect())
}

/// How the regression inputs are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureSet {
    /// The single most correlated statistic.
    Best,
    KBest(usize),
    /// Every statistic that varies across the table.
    All,
    Named(Vec<String>),
}

impl FeatureSet {
    /// Resolves to statistic names; constant columns are never selected.
    pub fn resolve(&self, report: &CorrelationReport) -> Result<(Vec<String>, Vec<String>)> {
        let varying = CorrelationReport {
            entries: report.entries.iter().filter(|e| !e.constant).cloned().collect(),
            ..report.clone()
        };
        let mut warnings = Vec::new();
        let names = match self {
            FeatureSet::Best => select_features(&varying, 1)?,
            FeatureSet::KBest(k) => select_features(&varying, *k)?,
            FeatureSet::All => {
                let dropped: Vec<&str> = report
                    .entries
                    .iter()
                    .filter(|e| e.constant)
                    .map(|e| e.name.as_str())
                    .collect();
                if !dropped.is_empty() {
                    warnings.push(format!("constant statistics left out: {}", dropped.join(", ")));
                }
                STAT_NAMES
                    .iter()
                    .filter(|n| varying.get(n).is_some())
                    .map(|n| n.to_string())
                    .collect()
            }
            FeatureSet::Named(names) => {
                for n in names {
                    match report.get(n) {
                        None => return Err(Error::UnknownStatistic(n.clone())),
                        Some(e) if e.constant => {
                            return Err(Error::ZeroVariance(format!(
                                "statistic {n} is constant across the table"
                            )))
                        }
                        Some(_) => {}
                    }
                }
                names.clone()
            }
        };
        Ok((names, warnings))
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "best" => return Ok(FeatureSet::Best),
            "all" => return Ok(FeatureSet::All),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("k-best:") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad feature count in '{s}'")))?;
            if k == 0 {
                return Err(Error::InvalidConfig("k-best needs k >= 1".into()));
            }
            return Ok(FeatureSet::KBest(k));
        }
        let names: Vec<String> = s.split(',').map(|n| n.trim().to_string()).collect();
        for n in &names {
            if !STAT_NAMES.contains(&n.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "unknown feature selection '{n}' (expected best, all, k-best:K or statistic names)"
                )));
            }
        }
        Ok(FeatureSet::Named(names))
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSet::Best => f.write_str("best"),
            FeatureSet::KBest(k) => write!(f, "k-best:{k}"),
            FeatureSet::All => f.write_str("all"),
            FeatureSet::Named(n) => f.write_str(&n.join(",")),
        }
    }
}
