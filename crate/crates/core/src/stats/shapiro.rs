//! Shapiro-Wilk W statistic with Royston's (1995) coefficient approximation.

use rand::seq::index;
use statrs::distribution::{ContinuousCDF, Normal};

use super::Data;
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::seeds::{self, stream};

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// The `n/2` leading coefficients; the full vector is antisymmetric.
pub fn coefficients(n: usize) -> Vec<f64> {
    assert!(n >= 3, "Shapiro-Wilk needs at least 3 values");
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let normal = Normal::standard();
    let an25 = n as f64 + 0.25;
    let m: Vec<f64> = (1..=half)
        .map(|i| normal.inverse_cdf((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    a[0] = a1;
    let (first, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first..half {
        a[i] = -m[i] / fac;
    }
    a
}

/// W for a sample of at least 3 values; `None` when the sample is constant.
pub fn shapiro_wilk(x: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 3 {
        return None;
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    shapiro_wilk_sorted(&sorted)
}

fn shapiro_wilk_sorted(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    let range = sorted[n - 1] - sorted[0];
    if !(range > 0.0) {
        return None;
    }
    // Scale by the range to keep the sums well conditioned.
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let ss: f64 = sorted.iter().map(|v| ((v - mean) / range).powi(2)).sum();
    let a = coefficients(n);
    let num: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ai)| ai * (sorted[n - 1 - i] - sorted[i]) / range)
        .sum();
    let w = num * num / ss;
    Some(w.min(1.0))
}

/// Mean W over the non-constant dimensions, each subsampled to at most
/// `max_n` values.
pub fn avg_normality(ds: &EmbeddingDataset, max_n: usize, seed: u64) -> Result<(f64, Vec<String>)> {
    let mut warnings = Vec::new();
    let w = avg_normality_of(&Data::new(ds), max_n, seed, &mut warnings)?;
    Ok((w, warnings))
}

pub(crate) fn avg_normality_of(
    data: &Data<'_>,
    max_n: usize,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<f64> {
    if max_n < 3 {
        return Err(Error::InvalidConfig(format!(
            "normality sample cap must be at least 3, got {max_n}"
        )));
    }
    if data.n < 3 {
        return Err(Error::InvalidDataset(format!(
            "Shapiro-Wilk needs at least 3 samples, got {}",
            data.n
        )));
    }
    let base = seeds::derive(seed, stream::SUBSAMPLE);
    let mut sum = 0.0;
    let mut used = 0usize;
    for j in 0..data.d {
        let mut col = data.column(j);
        // Sorting first makes the subsample depend on content, not row order.
        col.sort_by(f64::total_cmp);
        if col.len() > max_n {
            let mut rng = seeds::rng(seeds::derive_index(base, j as u64), "normality");
            let mut picked = index::sample(&mut rng, col.len(), max_n).into_vec();
            picked.sort_unstable();
            col = picked.into_iter().map(|i| col[i]).collect();
        }
        match shapiro_wilk_sorted(&col) {
            Some(w) => {
                sum += w;
                used += 1;
            }
            None => warnings.push(format!("avg_normality: dimension {j} is constant, skipped")),
        }
    }
    if used == 0 {
        return Err(Error::ZeroVariance("every dimension is constant".into()));
    }
    Ok(sum / used as f64)
}
