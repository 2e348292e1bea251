use serde::{Deserialize, Serialize};

use super::Data;
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalMoments {
    pub mean: f64,
    pub var: f64,
    pub train_mean: f64,
    pub train_std: f64,
}

/// Mean and population variance over all N·d values. `train_mean` and
/// `train_std` are computed over the same values.
pub fn global_moments(ds: &EmbeddingDataset) -> GlobalMoments {
    global_moments_of(&Data::new(ds))
}

pub(crate) fn global_moments_of(data: &Data<'_>) -> GlobalMoments {
    moments_of_values(&data.x)
}

pub(crate) fn moments_of_values(x: &[f64]) -> GlobalMoments {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    GlobalMoments {
        mean,
        var,
        train_mean: mean,
        train_std: var.sqrt(),
    }
}

/// Fisher excess kurtosis `m4 / m2² - 3`, or `None` for a constant sample.
pub fn excess_kurtosis(x: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (m2, m4) = x.iter().fold((0.0, 0.0), |(m2, m4), v| {
        let d2 = (v - mean) * (v - mean);
        (m2 + d2, m4 + d2 * d2)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    (m2 > 0.0).then(|| m4 / (m2 * m2) - 3.0)
}

/// Mean excess kurtosis over the non-constant dimensions.
pub fn avg_kurtosis(ds: &EmbeddingDataset) -> Result<(f64, Vec<String>)> {
    let mut warnings = Vec::new();
    let k = avg_kurtosis_of(&Data::new(ds), &mut warnings)?;
    Ok((k, warnings))
}

pub(crate) fn avg_kurtosis_of(data: &Data<'_>, warnings: &mut Vec<String>) -> Result<f64> {
    let mut sum = 0.0;
    let mut used = 0usize;
    for j in 0..data.d {
        match excess_kurtosis(&data.column(j)) {
            Some(k) => {
                sum += k;
                used += 1;
            }
            None => warnings.push(format!("avg_kurtosis: dimension {j} has zero variance, skipped")),
        }
    }
    if used == 0 {
        return Err(Error::ZeroVariance("every dimension is constant".into()));
    }
    Ok(sum / used as f64)
}
