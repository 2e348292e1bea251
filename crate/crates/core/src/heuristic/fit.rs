use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::pearson::pearson;
use super::table::ObservationTable;
use crate::error::{Error, Result};
use crate::stats::StatVector;
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Accept fewer rows than features + 1 and constant features, returning
    /// the minimum-norm least-squares solution instead of an error.
    pub min_norm: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMetadata {
    pub n_rows: usize,
    pub groups: Vec<String>,
    /// Numerical rank of the standardized design matrix.
    pub rank: usize,
    pub min_norm: bool,
    /// Correlation between in-sample predictions and targets, when defined.
    pub train_r: Option<f64>,
    pub warnings: Vec<String>,
}

/// `α = intercept + Σ coef_i · (s_i - mean_i) / std_i`, clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicModel {
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    pub standardization: Vec<Standardization>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub clamp_range: (f64, f64),
    pub fit: FitMetadata,
}

impl HeuristicModel {
    /// Prediction before clamping.
    pub fn predict_raw(&self, s: &StatVector) -> Result<f64> {
        let mut y = self.intercept;
        for ((name, st), c) in self
            .feature_names
            .iter()
            .zip(&self.standardization)
            .zip(&self.coefficients)
        {
            let v = s.get(name).ok_or_else(|| Error::MissingFeature(name.clone()))?;
            y += c * (v - st.mean) / st.std;
        }
        Ok(y)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: Self = serde_json::from_str(&text)?;
        let k = model.feature_names.len();
        if model.coefficients.len() != k || model.standardization.len() != k {
            return Err(Error::InvalidDataset(format!(
                "model {} lists {k} features but {} coefficients and {} scalings",
                path.display(),
                model.coefficients.len(),
                model.standardization.len()
            )));
        }
        if model.standardization.iter().any(|s| !(s.std > 0.0)) {
            return Err(Error::InvalidDataset(format!(
                "model {} has a non-positive feature scale",
                path.display()
            )));
        }
        Ok(model)
    }
}

/// Prediction clamped into the model's temperature range.
pub fn predict_temperature(model: &HeuristicModel, s: &StatVector) -> Result<f64> {
    let (lo, hi) = model.clamp_range;
    Ok(model.predict_raw(s)?.clamp(lo, hi))
}

pub fn fit_heuristic(tbl: &ObservationTable, features: &[String]) -> Result<HeuristicModel> {
    fit_heuristic_with(tbl, features, FitOptions::default())
}

/// Ordinary least squares on z-scored features through an SVD solve.
/// Rank-deficient designs get the minimum-norm solution and a warning.
pub fn fit_heuristic_with(
    tbl: &ObservationTable,
    features: &[String],
    opts: FitOptions,
) -> Result<HeuristicModel> {
    let k = features.len();
    let n = tbl.len();
    if k == 0 {
        return Err(Error::InvalidConfig("no features selected".into()));
    }
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "a fit needs at least 2 observations, got {n}"
        )));
    }
    if n < k + 1 && !opts.min_norm {
        return Err(Error::Underdetermined { rows: n, features: k });
    }
    let mut warnings = Vec::new();
    if n < k + 1 {
        warnings.push(format!(
            "underdetermined fit ({n} rows, {k} features): minimum-norm solution"
        ));
    }

    let mut standardization = Vec::with_capacity(k);
    let mut z = DMatrix::<f64>::zeros(n, k);
    for (j, name) in features.iter().enumerate() {
        let col = tbl.column(name)?;
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let mut std = var.sqrt();
        // Relative test so a column that differs only by rounding counts as constant.
        if !(std > 1e-12 * mean.abs().max(f64::MIN_POSITIVE)) {
            if !opts.min_norm {
                return Err(Error::ZeroVariance(format!(
                    "feature {name} is constant across the training rows"
                )));
            }
            warnings.push(format!("feature {name} is constant; its coefficient is zero"));
            std = 1.0;
            for i in 0..n {
                z[(i, j)] = 0.0;
            }
        } else {
            for (i, v) in col.iter().enumerate() {
                z[(i, j)] = (v - mean) / std;
            }
        }
        standardization.push(Standardization { mean, std });
    }

    let y = tbl.targets();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));

    let svd = z.svd(true, true);
    let max_sv = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let tol = max_sv * n.max(k) as f64 * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let coefficients: Vec<f64> = if rank == 0 {
        vec![0.0; k]
    } else {
        svd.solve(&yc, tol)
            .map_err(|e| Error::Numerical(format!("least-squares solve failed: {e}")))?
            .iter()
            .copied()
            .collect()
    };
    if rank < k && n > k {
        warnings.push(format!(
            "rank-deficient design (rank {rank} of {k}): minimum-norm solution"
        ));
    }

    let mut model = HeuristicModel {
        schema_version: SCHEMA_VERSION,
        feature_names: features.to_vec(),
        standardization,
        coefficients,
        intercept: y_mean,
        clamp_range: tbl.alpha_range(),
        fit: FitMetadata {
            n_rows: n,
            groups: tbl.groups(),
            rank,
            min_norm: opts.min_norm,
            train_r: None,
            warnings,
        },
    };
    let fitted: Vec<f64> = tbl
        .rows()
        .iter()
        .map(|r| predict_temperature(&model, &r.stats))
        .collect::<Result<_>>()?;
    model.fit.train_r = if n >= 3 {
        pearson(&fitted, &y).ok().map(|c| c.r)
    } else {
        None
    };
    Ok(model)
}
