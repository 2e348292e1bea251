use nalgebra::{DMatrix, SymmetricEigen};

use super::Data;
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

pub const PCA_THRESHOLDS: [f64; 6] = [0.50, 0.75, 0.80, 0.90, 0.95, 0.99];

// Cumulative sums are compared with this much relative slack so that exactly
// reachable thresholds (equal eigenvalues) are not lost to rounding.
const CUMSUM_SLACK: f64 = 1e-10;

/// Population covariance of the columns.
pub(crate) fn covariance(data: &Data<'_>) -> DMatrix<f64> {
    let d = data.d;
    let means = data.column_means();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    let mut centered = vec![0.0; d];
    for row in data.x.chunks_exact(d) {
        for (c, (v, m)) in centered.iter_mut().zip(row.iter().zip(&means)) {
            *c = v - m;
        }
        for a in 0..d {
            for b in a..d {
                cov[(a, b)] += centered[a] * centered[b];
            }
        }
    }
    let n = data.n as f64;
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / n;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    cov
}

/// For each threshold t, `k / d` where k is the smallest number of leading
/// covariance eigenvalues whose sum reaches `t` of the total.
pub fn pca_fractions(ds: &EmbeddingDataset, thresholds: &[f64]) -> Result<Vec<f64>> {
    pca_fractions_of(&Data::new(ds), thresholds)
}

pub(crate) fn pca_fractions_of(data: &Data<'_>, thresholds: &[f64]) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(covariance(data));
    let mut values: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    fractions_from_eigenvalues(&values, thresholds)
}

pub(crate) fn fractions_from_eigenvalues(sorted_desc: &[f64], thresholds: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = sorted_desc.iter().sum();
    if !(total > 0.0) {
        return Err(Error::RankZeroCovariance);
    }
    let d = sorted_desc.len();
    let mut cumsum = Vec::with_capacity(d);
    let mut acc = 0.0;
    for v in sorted_desc {
        acc += v;
        cumsum.push(acc);
    }
    Ok(thresholds
        .iter()
        .map(|&t| {
            let target = t * total * (1.0 - CUMSUM_SLACK);
            let k = cumsum.iter().position(|&s| s >= target).map_or(d, |i| i + 1);
            k as f64 / d as f64
        })
        .collect())
}
