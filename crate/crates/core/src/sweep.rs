//! Grid search over the inverse temperature.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{train_linear, TrainConfig};
use crate::dataset::SplitDataset;
use crate::error::{Error, Result};

pub use crate::SCHEMA_VERSION;

/// Strictly ascending positive α values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TemperatureGrid {
    values: Vec<f64>,
}

impl TemperatureGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("temperature grid is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidConfig(format!("grid value {v} is not > 0")));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("grid values must be strictly ascending".into()));
        }
        Ok(Self { values })
    }

    /// α = 1 followed by 5, 10, …, 250.
    pub fn standard() -> Self {
        let mut values = vec![1.0];
        values.extend((1..=50).map(|k| 5.0 * k as f64));
        Self { values }
    }

    /// Parses `start:end:step`, producing `start, start+step, …` up to and
    /// including `end`, with α = 1 prepended when `prepend_one` is set and it
    /// is not already the first value. `1:10:5` gives {1, 6}.
    pub fn parse(spec: &str, prepend_one: bool) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("grid '{spec}' is not start:end:step"));
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, end, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0) || !(start > 0.0) || end < start {
            return Err(Error::InvalidConfig(format!(
                "grid '{spec}' needs start > 0, end >= start and step > 0"
            )));
        }
        let mut values = Vec::new();
        if prepend_one && start > 1.0 {
            values.push(1.0);
        }
        let mut k = 0u32;
        loop {
            let v = start + f64::from(k) * step;
            if v > end + step * 1e-9 {
                break;
            }
            values.push(v);
            k += 1;
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

impl TryFrom<Vec<f64>> for TemperatureGrid {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<TemperatureGrid> for Vec<f64> {
    fn from(g: TemperatureGrid) -> Self {
        g.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub acc_mean: f64,
    pub acc_std: f64,
    pub n_repeats: usize,
    pub any_diverged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub dataset_name: String,
    pub extractor: String,
    pub per_alpha: Vec<AlphaPoint>,
    pub optimal_alpha: f64,
}

/// Trains `repeats` classifiers per grid value and records the mean and
/// standard deviation of their best validation accuracy.
///
/// Run `r` uses seed `template.seed + r` at every α, so cells are independent
/// jobs whose results do not depend on scheduling.
pub fn run_sweep(
    split: &SplitDataset,
    grid: &TemperatureGrid,
    template: &TrainConfig,
    repeats: usize,
) -> Result<SweepResult> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be >= 1".into()));
    }
    template.validate()?;
    let cells: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|a| (0..repeats).map(move |r| (a, r)))
        .collect();
    let runs: Vec<(f64, bool)> = cells
        .par_iter()
        .map(|&(a, r)| {
            let mut cfg = template.clone();
            cfg.alpha = grid.values[a];
            cfg.seed = template.seed.wrapping_add(r as u64);
            train_linear(split, &cfg).map(|run| (run.best_val_accuracy, run.diverged))
        })
        .collect::<Result<_>>()?;

    let per_alpha: Vec<AlphaPoint> = grid
        .values
        .iter()
        .zip(runs.chunks_exact(repeats))
        .map(|(&alpha, cell)| {
            let accs: Vec<f64> = cell.iter().map(|(a, _)| *a).collect();
            let (acc_mean, acc_std) = mean_std(&accs);
            AlphaPoint {
                alpha,
                acc_mean,
                acc_std,
                n_repeats: repeats,
                any_diverged: cell.iter().any(|(_, d)| *d),
            }
        })
        .collect();
    let optimal_alpha = optimal_alpha(&per_alpha)?;
    Ok(SweepResult {
        dataset_name: split.train.name().to_string(),
        extractor: split.train.extractor().to_string(),
        per_alpha,
        optimal_alpha,
    })
}

/// Mean and sample standard deviation (0 for a single value).
fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn optimal_alpha(points: &[AlphaPoint]) -> Result<f64> {
    let mut best: Option<&AlphaPoint> = None;
    for p in points {
        best = match best {
            None => Some(p),
            Some(b) if p.acc_mean > b.acc_mean || (p.acc_mean == b.acc_mean && p.alpha < b.alpha) => {
                Some(p)
            }
            keep => keep,
        };
    }
    best.map(|p| p.alpha).ok_or(Error::EmptySweep)
}

/// The α with the highest mean accuracy; ties go to the smallest α.
pub fn best_temperature(sr: &SweepResult) -> Result<f64> {
    optimal_alpha(&sr.per_alpha)
}

pub const CURVE_HEADER: &str = "alpha,acc_mean,acc_std,n,diverged";

#[derive(Serialize, Deserialize)]
struct CurveSidecar {
    schema_version: u32,
    dataset_name: String,
    extractor: String,
    optimal_alpha: f64,
    per_alpha: Vec<AlphaPoint>,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes the curve as CSV plus a JSON sidecar (same stem, `.json`).
pub fn emit_curve(sr: &SweepResult, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut out = String::new();
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for p in &sr.per_alpha {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.alpha, p.acc_mean, p.acc_std, p.n_repeats, p.any_diverged
        ));
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))?;

    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&CurveSidecar {
        schema_version: SCHEMA_VERSION,
        dataset_name: sr.dataset_name.clone(),
        extractor: sr.extractor.clone(),
        optimal_alpha: sr.optimal_alpha,
        per_alpha: sr.per_alpha.clone(),
    })?;
    fs::write(&side, json).map_err(|e| Error::io(&side, e))
}

/// Reads the rows of a curve CSV written by [`emit_curve`].
pub fn read_curve(path: &Path) -> Result<Vec<AlphaPoint>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CURVE_HEADER {
        return Err(Error::MalformedHeader {
            path: path.to_path_buf(),
            reason: format!("expected '{CURVE_HEADER}', found '{header}'"),
        });
    }
    let mut points = Vec::new();
    for record in reader.records() {
        let r = record?;
        let num = |i: usize| -> Result<f64> {
            r[i].parse()
                .map_err(|_| Error::InvalidDataset(format!("bad number {:?} in curve", &r[i])))
        };
        points.push(AlphaPoint {
            alpha: num(0)?,
            acc_mean: num(1)?,
            acc_std: num(2)?,
            n_repeats: num(3)? as usize,
            any_diverged: &r[4] == "true",
        });
    }
    Ok(points)
}

/// Reads a sweep back from its CSV and sidecar.
pub fn read_sweep(csv_path: &Path) -> Result<SweepResult> {
    let side = sidecar_path(csv_path);
    let bytes = fs::read(&side).map_err(|e| Error::io(&side, e))?;
    let sc: CurveSidecar = serde_json::from_slice(&bytes)?;
    Ok(SweepResult {
        dataset_name: sc.dataset_name,
        extractor: sc.extractor,
        per_alpha: read_curve(csv_path)?,
        optimal_alpha: sc.optimal_alpha,
    })
}
