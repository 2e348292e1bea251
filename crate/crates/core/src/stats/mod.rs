//! Statistical description of an embedding dataset.
//!
//! Conventions used throughout: population (1/N) moments and covariances,
//! Fisher excess kurtosis, Euclidean distances for the clustering indices.
//!
//! `sb_trace` and `sw_trace` keep their historical labels even though they
//! read backwards against the usual between/within naming:
//! `sb_trace` is the trace of the mean intra-class covariance and `sw_trace`
//! the trace of the covariance of the class means.

mod clustering;
mod moments;
mod pca;
mod redundancy;
mod scatter;
pub mod shapiro;

use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

pub use clustering::{calinski_harabasz, clustering_scores, davies_bouldin, silhouette};
pub use moments::{avg_kurtosis, excess_kurtosis, global_moments, GlobalMoments};
pub use pca::{pca_fractions, PCA_THRESHOLDS};
pub use redundancy::feature_redundancy;
pub use scatter::scatter_traces;

/// Names of every statistic in their fixed order.
pub const STAT_NAMES: [&str; 23] = [
    "dim",
    "n_classes",
    "n_samples",
    "avg_samp_class",
    "mean",
    "var",
    "train_mean",
    "train_std",
    "sb_trace",
    "sw_trace",
    "feats_corr",
    "feats_cos_sim",
    "pca_50",
    "pca_75",
    "pca_80",
    "pca_90",
    "pca_95",
    "pca_99",
    "avg_kurtosis",
    "avg_normality",
    "silhouette",
    "calinski_harabasz",
    "davies_bouldin",
];

/// Plain-language meaning of each statistic, in [`STAT_NAMES`] order.
pub const STAT_DESCRIPTIONS: [&str; 23] = [
    "embedding dimensionality",
    "number of classes",
    "number of samples",
    "samples per class (n_samples / n_classes)",
    "mean of all embedding values",
    "population variance of all embedding values",
    "mean of all embedding values (same population as mean)",
    "standard deviation of all embedding values (sqrt of var)",
    "trace of the unweighted mean of the per-class covariance matrices (intra-class spread)",
    "trace of the covariance of the class means about the global mean (inter-class spread)",
    "mean squared difference between the feature correlation matrix and the identity",
    "mean cosine similarity over all pairs of feature columns",
    "fraction of dimensions needed to explain 50% of the variance",
    "fraction of dimensions needed to explain 75% of the variance",
    "fraction of dimensions needed to explain 80% of the variance",
    "fraction of dimensions needed to explain 90% of the variance",
    "fraction of dimensions needed to explain 95% of the variance",
    "fraction of dimensions needed to explain 99% of the variance",
    "mean Fisher excess kurtosis over dimensions",
    "mean Shapiro-Wilk W over dimensions",
    "mean silhouette coefficient with labels as clusters",
    "Calinski-Harabasz index with labels as clusters",
    "Davies-Bouldin index with labels as clusters",
];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StatVector {
    pub dim: f64,
    pub n_classes: f64,
    pub n_samples: f64,
    pub avg_samp_class: f64,
    pub mean: f64,
    pub var: f64,
    pub train_mean: f64,
    pub train_std: f64,
    pub sb_trace: f64,
    pub sw_trace: f64,
    pub feats_corr: f64,
    pub feats_cos_sim: f64,
    pub pca_50: f64,
    pub pca_75: f64,
    pub pca_80: f64,
    pub pca_90: f64,
    pub pca_95: f64,
    pub pca_99: f64,
    pub avg_kurtosis: f64,
    pub avg_normality: f64,
    pub silhouette: f64,
    pub calinski_harabasz: f64,
    pub davies_bouldin: f64,
}

impl StatVector {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.dim,
            self.n_classes,
            self.n_samples,
            self.avg_samp_class,
            self.mean,
            self.var,
            self.train_mean,
            self.train_std,
            self.sb_trace,
            self.sw_trace,
            self.feats_corr,
            self.feats_cos_sim,
            self.pca_50,
            self.pca_75,
            self.pca_80,
            self.pca_90,
            self.pca_95,
            self.pca_99,
            self.avg_kurtosis,
            self.avg_normality,
            self.silhouette,
            self.calinski_harabasz,
            self.davies_bouldin,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let idx = STAT_NAMES.iter().position(|n| *n == name)?;
        Some(self.to_vec()[idx])
    }

    /// `(name, value)` pairs in the fixed order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        STAT_NAMES.iter().copied().zip(self.to_vec()).collect()
    }

    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        let mut values = [f64::NAN; 23];
        for (name, v) in entries {
            let idx = STAT_NAMES
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| Error::UnknownStatistic(name.to_string()))?;
            values[idx] = v;
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::MissingFeature(STAT_NAMES[i].to_string()));
        }
        let [dim, n_classes, n_samples, avg_samp_class, mean, var, train_mean, train_std, sb_trace, sw_trace, feats_corr, feats_cos_sim, pca_50, pca_75, pca_80, pca_90, pca_95, pca_99, avg_kurtosis, avg_normality, silhouette, calinski_harabasz, davies_bouldin] =
            values;
        Ok(Self {
            dim,
            n_classes,
            n_samples,
            avg_samp_class,
            mean,
            var,
            train_mean,
            train_std,
            sb_trace,
            sw_trace,
            feats_corr,
            feats_cos_sim,
            pca_50,
            pca_75,
            pca_80,
            pca_90,
            pca_95,
            pca_99,
            avg_kurtosis,
            avg_normality,
            silhouette,
            calinski_harabasz,
            davies_bouldin,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsConfig {
    /// Per-dimension cap for the Shapiro-Wilk sample.
    pub normality_max_n: usize,
    /// Point cap for the silhouette computation.
    pub silhouette_max_n: usize,
    /// Seed for both subsamples.
    pub seed: u64,
    /// L2-normalize rows before computing anything.
    pub normalize_first: bool,
}

impl Default for StatsConfig {
    fn default() -> Self {
        Self {
            normality_max_n: 5000,
            silhouette_max_n: 5000,
            seed: 0,
            normalize_first: false,
        }
    }
}

/// A statistic vector plus the substitutions made while computing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub stats: StatVector,
    pub warnings: Vec<String>,
}

/// Dataset values widened to `f64`, shared by the individual statistics.
pub(crate) struct Data<'a> {
    pub x: Vec<f64>,
    pub n: usize,
    pub d: usize,
    pub labels: &'a [u32],
    pub c: usize,
}

impl<'a> Data<'a> {
    pub fn new(ds: &'a EmbeddingDataset) -> Self {
        Self {
            x: ds.values().iter().map(|&v| f64::from(v)).collect(),
            n: ds.n_samples(),
            d: ds.dim(),
            labels: ds.labels(),
            c: ds.n_classes(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.x[i * self.d + j]).collect()
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for row in self.x.chunks_exact(self.d) {
            for (a, v) in m.iter_mut().zip(row) {
                *a += v;
            }
        }
        m.iter_mut().for_each(|a| *a /= self.n as f64);
        m
    }

    pub fn column_variances(&self) -> Vec<f64> {
        let means = self.column_means();
        let mut v = vec![0.0; self.d];
        for row in self.x.chunks_exact(self.d) {
            for ((a, x), m) in v.iter_mut().zip(row).zip(&means) {
                *a += (x - m) * (x - m);
            }
        }
        v.iter_mut().for_each(|a| *a /= self.n as f64);
        v
    }

    /// Class centroids (`c × d`, row-major) and class sizes.
    pub fn centroids(&self) -> (Vec<f64>, Vec<usize>) {
        let mut sums = vec![0.0; self.c * self.d];
        let mut counts = vec![0usize; self.c];
        for (i, &l) in self.labels.iter().enumerate() {
            let l = l as usize;
            counts[l] += 1;
            for (s, v) in sums[l * self.d..(l + 1) * self.d].iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        for (l, &n) in counts.iter().enumerate() {
            if n > 0 {
                sums[l * self.d..(l + 1) * self.d]
                    .iter_mut()
                    .for_each(|s| *s /= n as f64);
            }
        }
        (sums, counts)
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Computes every statistic.
///
/// Fails with `ZeroVarianceDataset` when no dimension varies.
pub fn extract_stats(ds: &EmbeddingDataset, cfg: &StatsConfig) -> Result<StatReport> {
    let normalized;
    let ds = if cfg.normalize_first {
        normalized = ds.l2_normalized();
        &normalized
    } else {
        ds
    };
    let data = Data::new(ds);
    if data.column_variances().iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroVarianceDataset);
    }
    let mut warnings = Vec::new();

    let m = moments::global_moments_of(&data);
    let (sb_trace, sw_trace) = scatter::scatter_traces_of(&data, &mut warnings);
    let (feats_corr, feats_cos_sim) = redundancy::feature_redundancy_of(&data, &mut warnings);
    let pca = pca::pca_fractions_of(&data, &PCA_THRESHOLDS)?;
    let avg_kurtosis = moments::avg_kurtosis_of(&data, &mut warnings)?;
    let avg_normality = shapiro::avg_normality_of(&data, cfg.normality_max_n, cfg.seed, &mut warnings)?;
    let (silhouette, calinski_harabasz, davies_bouldin) =
        clustering::clustering_scores_of(&data, cfg.silhouette_max_n, cfg.seed, &mut warnings)?;

    let stats = StatVector {
        dim: data.d as f64,
        n_classes: data.c as f64,
        n_samples: data.n as f64,
        avg_samp_class: data.n as f64 / data.c as f64,
        mean: m.mean,
        var: m.var,
        train_mean: m.train_mean,
        train_std: m.train_std,
        sb_trace,
        sw_trace,
        feats_corr,
        feats_cos_sim,
        pca_50: pca[0],
        pca_75: pca[1],
        pca_80: pca[2],
        pca_90: pca[3],
        pca_95: pca[4],
        pca_99: pca[5],
        avg_kurtosis,
        avg_normality,
        silhouette,
        calinski_harabasz,
        davies_bouldin,
    };
    if let Some((name, _)) = stats.entries().into_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Numerical(format!("statistic {name} is not finite")));
    }
    Ok(StatReport { stats, warnings })
}
