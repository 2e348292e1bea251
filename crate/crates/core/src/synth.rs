//! Synthetic embedding datasets with controllable class structure and
//! feature redundancy.

use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::seeds;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_classes: usize,
    pub dim: usize,
    pub samples_per_class: usize,
    /// Radius of the sphere the class centers are drawn on.
    pub mean_separation: f64,
    pub within_std: f64,
    /// Number of trailing columns overwritten with copies of leading ones.
    #[serde(default)]
    pub feature_duplication: usize,
    /// Standard deviation of a per-sample latent factor added to every
    /// feature. It is independent of the class, so it only correlates the
    /// features with each other.
    #[serde(default)]
    pub shared_factor_std: f64,
    /// Mean of the shared factor; a positive value mimics the common
    /// activation level of nonnegative (post-ReLU) embeddings.
    #[serde(default)]
    pub shared_factor_mean: f64,
    #[serde(default)]
    pub seed: u64,
    /// Dataset (group) name; derived from the class structure when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_classes < 2 {
            return bad("n_classes must be >= 2");
        }
        if self.dim < 2 {
            return bad("dim must be >= 2");
        }
        if self.samples_per_class < 2 {
            return bad("samples_per_class must be >= 2");
        }
        if !(self.mean_separation >= 0.0 && self.mean_separation.is_finite()) {
            return bad("mean_separation must be >= 0");
        }
        if !(self.within_std > 0.0 && self.within_std.is_finite()) {
            return bad("within_std must be > 0");
        }
        if self.feature_duplication >= self.dim {
            return bad("feature_duplication must be < dim");
        }
        if !(self.shared_factor_std >= 0.0 && self.shared_factor_std.is_finite()) {
            return bad("shared_factor_std must be >= 0");
        }
        if !self.shared_factor_mean.is_finite() {
            return bad("shared_factor_mean must be finite");
        }
        Ok(())
    }

    /// Identity of the class structure, used as the dataset (group) name.
    pub fn dataset_name(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!(
                "synth-c{}-n{}-sep{}-std{}",
                self.n_classes, self.samples_per_class, self.mean_separation, self.within_std
            ),
        }
    }

    /// Identity of the "representation": dimensionality and redundancy.
    pub fn extractor_name(&self) -> String {
        let mut name = format!(
            "d{}-dup{}-tau{}",
            self.dim, self.feature_duplication, self.shared_factor_std
        );
        if self.shared_factor_mean != 0.0 {
            name.push_str(&format!("-mu{}", self.shared_factor_mean));
        }
        name
    }
}

/// Class centers on a sphere of radius `mean_separation`, isotropic Gaussian
/// noise around them plus the shared factor `N(mean, std²)`, then the last
/// `feature_duplication` columns replaced by copies of the first ones.
pub fn generate(spec: &SynthSpec) -> Result<EmbeddingDataset> {
    spec.validate()?;
    let mut rng = seeds::rng(spec.seed, seeds::stream::SYNTH);
    let d = spec.dim;
    let centers: Vec<Vec<f64>> = (0..spec.n_classes)
        .map(|_| {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.into_iter().map(|a| spec.mean_separation * a / norm).collect()
        })
        .collect();
    let noise = Normal::new(0.0, spec.within_std)
        .map_err(|e| Error::InvalidConfig(format!("within_std: {e}")))?;
    let factor = Normal::new(0.0, spec.shared_factor_std)
        .map_err(|e| Error::InvalidConfig(format!("shared_factor_std: {e}")))?;

    let n = spec.n_classes * spec.samples_per_class;
    let mut x = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..spec.samples_per_class {
            let shared = spec.shared_factor_mean
                + if spec.shared_factor_std > 0.0 {
                    factor.sample(&mut rng)
                } else {
                    0.0
                };
            let start = x.len();
            x.extend(center.iter().map(|m| (m + shared + noise.sample(&mut rng)) as f32));
            let row = &mut x[start..];
            for j in 0..spec.feature_duplication {
                row[d - spec.feature_duplication + j] = row[j];
            }
            if row.iter().all(|&v| v == 0.0) {
                row[0] = f32::MIN_POSITIVE;
            }
            labels.push(c as u32);
        }
    }
    EmbeddingDataset::new(spec.dataset_name(), spec.extractor_name(), x, d, labels)
}

/// Cartesian grid of synthetic specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthGrid {
    pub n_classes: Vec<usize>,
    pub dim: Vec<usize>,
    pub samples_per_class: Vec<usize>,
    pub mean_separation: Vec<f64>,
    pub within_std: Vec<f64>,
    #[serde(default = "default_dup")]
    pub feature_duplication: Vec<usize>,
    #[serde(default = "default_factor")]
    pub shared_factor_std: Vec<f64>,
    /// Mean of the shared factor; a positive value mimics the common
    /// activation level of nonnegative (post-ReLU) embeddings.
    #[serde(default)]
    pub shared_factor_mean: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_dup() -> Vec<usize> {
    vec![0]
}

fn default_factor() -> Vec<f64> {
    vec![0.0]
}

impl SynthGrid {
    pub fn specs(&self) -> Vec<SynthSpec> {
        let mut out = Vec::new();
        for &n_classes in &self.n_classes {
            for &samples_per_class in &self.samples_per_class {
                for &mean_separation in &self.mean_separation {
                    for &within_std in &self.within_std {
                        for &dim in &self.dim {
                            for &feature_duplication in &self.feature_duplication {
                                for &shared_factor_std in &self.shared_factor_std {
                                    let mut spec = SynthSpec {
                                        n_classes,
                                        dim,
                                        samples_per_class,
                                        mean_separation,
                                        within_std,
                                        feature_duplication,
                                        shared_factor_std,
                                        shared_factor_mean: self.shared_factor_mean,
                                        seed: 0,
                                        name: None,
                                    };
                                    spec.seed = seeds::derive(
                                        self.seed,
                                        &format!("{}/{}", spec.dataset_name(), spec.extractor_name()),
                                    );
                                    out.push(spec);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn generate_suite(specs: &[SynthSpec]) -> Result<Vec<EmbeddingDataset>> {
    if specs.is_empty() {
        return Err(Error::InvalidConfig("empty synthetic grid".into()));
    }
    let suite = specs.iter().map(generate).collect::<Result<Vec<_>>>()?;
    let mut keys: Vec<(&str, &str)> = suite.iter().map(|d| (d.name(), d.extractor())).collect();
    keys.sort_unstable();
    if keys.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfig("synthetic suite contains duplicate names".into()));
    }
    Ok(suite)
}
