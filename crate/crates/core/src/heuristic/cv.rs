use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_heuristic_with, predict_temperature, FitOptions};
use super::pearson::pearson;
use super::table::ObservationTable;
use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeldOutPrediction {
    pub extractor: String,
    pub predicted: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub held_out_dataset: String,
    pub n_points: usize,
    /// Held-out correlation; absent when the fold has fewer than 3 points or
    /// a constant side.
    pub pearson_r: Option<f64>,
    pub predictions: Vec<HeldOutPrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub schema_version: u32,
    pub features: Vec<String>,
    pub folds: Vec<FoldResult>,
    pub n_valid_folds: usize,
    pub median_r: Option<f64>,
    pub mean_r: Option<f64>,
    /// Population standard deviation of the per-fold correlations.
    pub std_r: Option<f64>,
    /// Correlation over every held-out prediction pooled together.
    pub pooled_r: Option<f64>,
    pub pooled_p_value: Option<f64>,
    pub warnings: Vec<String>,
}

impl CvReport {
    /// CSV with one row per held-out prediction.
    pub fn predictions_csv(&self) -> String {
        let mut out = String::from("dataset,extractor,predicted,observed\n");
        for fold in &self.folds {
            for p in &fold.predictions {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fold.held_out_dataset, p.extractor, p.predicted, p.observed
                ));
            }
        }
        out
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Leave-one-dataset-out cross-validation: one fold per dataset name.
pub fn logo_cv(tbl: &ObservationTable, features: &[String], opts: FitOptions) -> Result<CvReport> {
    let groups = tbl.groups();
    if groups.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "cross-validation needs at least 2 datasets, got {}",
            groups.len()
        )));
    }
    let folds: Vec<(FoldResult, Vec<String>)> = groups
        .par_iter()
        .map(|group| {
            let (train, held) = tbl.split_group(group);
            let model = fit_heuristic_with(&train, features, opts).map_err(|e| match e {
                Error::Underdetermined { rows, features } => Error::UnderdeterminedFold {
                    fold: group.clone(),
                    rows,
                    features,
                },
                other => other,
            })?;
            let mut warnings: Vec<String> = model
                .fit
                .warnings
                .iter()
                .map(|w| format!("fold {group}: {w}"))
                .collect();
            let predictions = held
                .rows()
                .iter()
                .map(|r| {
                    Ok(HeldOutPrediction {
                        extractor: r.extractor.clone(),
                        predicted: predict_temperature(&model, &r.stats)?,
                        observed: r.optimal_alpha,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let n_points = predictions.len();
            let pearson_r = if n_points >= 3 {
                let p: Vec<f64> = predictions.iter().map(|p| p.predicted).collect();
                let o: Vec<f64> = predictions.iter().map(|p| p.observed).collect();
                match pearson(&p, &o) {
                    Ok(c) => Some(c.r),
                    Err(Error::ZeroVariance(_)) => {
                        warnings.push(format!(
                            "fold {group}: constant predictions or targets, no correlation"
                        ));
                        None
                    }
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            Ok((
                FoldResult {
                    held_out_dataset: group.clone(),
                    n_points,
                    pearson_r,
                    predictions,
                },
                warnings,
            ))
        })
        .collect::<Result<_>>()?;

    let mut warnings = Vec::new();
    let mut results = Vec::with_capacity(folds.len());
    for (fold, w) in folds {
        warnings.extend(w);
        results.push(fold);
    }

    let mut rs: Vec<f64> = results.iter().filter_map(|f| f.pearson_r).collect();
    rs.sort_by(f64::total_cmp);
    let (median_r, mean_r, std_r) = if rs.is_empty() {
        (None, None, None)
    } else {
        let mean = rs.iter().sum::<f64>() / rs.len() as f64;
        let var = rs.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / rs.len() as f64;
        (Some(median(&rs)), Some(mean), Some(var.sqrt()))
    };

    let pooled_pred: Vec<f64> = results
        .iter()
        .flat_map(|f| f.predictions.iter().map(|p| p.predicted))
        .collect();
    let pooled_obs: Vec<f64> = results
        .iter()
        .flat_map(|f| f.predictions.iter().map(|p| p.observed))
        .collect();
    let (pooled_r, pooled_p_value) = match pearson(&pooled_pred, &pooled_obs) {
        Ok(c) => (Some(c.r), Some(c.p)),
        Err(Error::ZeroVariance(_)) => {
            warnings.push("pooled predictions or targets are constant, no correlation".into());
            (None, None)
        }
        Err(e) => return Err(e),
    };

    Ok(CvReport {
        schema_version: SCHEMA_VERSION,
        features: features.to_vec(),
        n_valid_folds: rs.len(),
        folds: results,
        median_r,
        mean_r,
        std_r,
        pooled_r,
        pooled_p_value,
        warnings,
    })
}
