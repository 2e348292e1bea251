use rand::seq::index;
use rayon::prelude::*;

use super::{sq_dist, Data};
use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::seeds::{self, stream};

fn check_partition(n: usize, c: usize, counts: &[usize]) -> Result<()> {
    let populated = counts.iter().filter(|&&k| k > 0).count();
    if populated < 2 {
        return Err(Error::InvalidDataset(
            "clustering scores need at least two populated classes".into(),
        ));
    }
    if n <= c {
        return Err(Error::InvalidDataset(format!(
            "clustering scores need more samples than classes ({n} samples, {c} classes)"
        )));
    }
    Ok(())
}

/// Mean silhouette coefficient over the given rows (`n × d`, row-major).
/// Points alone in their class score 0.
pub fn silhouette(x: &[f64], d: usize, labels: &[u32], n_classes: usize) -> f64 {
    let n = labels.len();
    let mut counts = vec![0usize; n_classes];
    for &l in labels {
        counts[l as usize] += 1;
    }
    // Collected before summing so the result does not depend on the thread count.
    let per_point: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let own = labels[i] as usize;
            if counts[own] < 2 {
                return 0.0;
            }
            let xi = &x[i * d..(i + 1) * d];
            let mut sums = vec![0.0; n_classes];
            for (j, xj) in x.chunks_exact(d).enumerate() {
                if j != i {
                    sums[labels[j] as usize] += sq_dist(xi, xj).sqrt();
                }
            }
            let a = sums[own] / (counts[own] - 1) as f64;
            let b = (0..n_classes)
                .filter(|&k| k != own && counts[k] > 0)
                .map(|k| sums[k] / counts[k] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m > 0.0 {
                (b - a) / m
            } else {
                0.0
            }
        })
        .collect();
    per_point.iter().sum::<f64>() / n as f64
}

/// `(tr(B)/(C-1)) / (tr(W)/(N-C))`, or 1 when every class is a single point.
pub fn calinski_harabasz(ds: &EmbeddingDataset) -> Result<f64> {
    let data = Data::new(ds);
    let (_, counts) = data.centroids();
    check_partition(data.n, data.c, &counts)?;
    Ok(calinski_harabasz_of(&data))
}

fn calinski_harabasz_of(data: &Data<'_>) -> f64 {
    let d = data.d;
    let (centroids, counts) = data.centroids();
    let global = data.column_means();
    let between: f64 = centroids
        .chunks_exact(d)
        .zip(&counts)
        .map(|(mu, &k)| k as f64 * sq_dist(mu, &global))
        .sum();
    let within: f64 = data
        .labels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let l = l as usize;
            sq_dist(data.row(i), &centroids[l * d..(l + 1) * d])
        })
        .sum();
    let c = counts.iter().filter(|&&k| k > 0).count() as f64;
    if within == 0.0 {
        1.0
    } else {
        between * (data.n as f64 - c) / (within * (c - 1.0))
    }
}

/// Mean over classes of the worst `(s_i + s_j) / |μ_i - μ_j|` ratio, s being
/// the mean distance of a class's points to its centroid. Coincident
/// centroids are treated as infinitely far apart.
pub fn davies_bouldin(ds: &EmbeddingDataset) -> Result<f64> {
    let data = Data::new(ds);
    let (_, counts) = data.centroids();
    check_partition(data.n, data.c, &counts)?;
    Ok(davies_bouldin_of(&data))
}

fn davies_bouldin_of(data: &Data<'_>) -> f64 {
    let d = data.d;
    let (centroids, counts) = data.centroids();
    let classes: Vec<usize> = (0..data.c).filter(|&k| counts[k] > 0).collect();
    let mut spread = vec![0.0; data.c];
    for (i, &l) in data.labels.iter().enumerate() {
        let l = l as usize;
        spread[l] += sq_dist(data.row(i), &centroids[l * d..(l + 1) * d]).sqrt();
    }
    for &k in &classes {
        spread[k] /= counts[k] as f64;
    }
    let centroid = |k: usize| &centroids[k * d..(k + 1) * d];
    let mut total = 0.0;
    for &i in &classes {
        let worst = classes
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| {
                let dist = sq_dist(centroid(i), centroid(j)).sqrt();
                if dist == 0.0 {
                    0.0
                } else {
                    (spread[i] + spread[j]) / dist
                }
            })
            .fold(0.0, f64::max);
        total += worst;
    }
    total / classes.len() as f64
}

/// Row indices of a stratified subsample of at most `max_n` points.
///
/// Within each class rows are ordered by content before the seeded draw, so
/// the selected points do not depend on row order.
fn stratified_subsample(data: &Data<'_>, max_n: usize, seed: u64) -> Vec<usize> {
    if data.n <= max_n {
        return (0..data.n).collect();
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.c];
    for (i, &l) in data.labels.iter().enumerate() {
        by_class[l as usize].push(i);
    }
    let base = seeds::derive(seed, stream::SUBSAMPLE);
    let mut picked = Vec::with_capacity(max_n);
    for (class, rows) in by_class.iter_mut().enumerate() {
        if rows.is_empty() {
            continue;
        }
        rows.sort_by(|&a, &b| {
            data.row(a)
                .iter()
                .zip(data.row(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let take = (max_n * rows.len() / data.n).clamp(1, rows.len());
        let mut rng = seeds::rng(seeds::derive_index(base, class as u64), "silhouette");
        picked.extend(index::sample(&mut rng, rows.len(), take).into_iter().map(|k| rows[k]));
    }
    picked.sort_unstable();
    picked
}

/// `(silhouette, calinski_harabasz, davies_bouldin)` with the labels as the
/// cluster assignment.
pub fn clustering_scores(
    ds: &EmbeddingDataset,
    silhouette_max_n: usize,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    let mut warnings = Vec::new();
    clustering_scores_of(&Data::new(ds), silhouette_max_n, seed, &mut warnings)
}

pub(crate) fn clustering_scores_of(
    data: &Data<'_>,
    silhouette_max_n: usize,
    seed: u64,
    warnings: &mut Vec<String>,
) -> Result<(f64, f64, f64)> {
    let (_, counts) = data.centroids();
    check_partition(data.n, data.c, &counts)?;
    if silhouette_max_n <= data.c {
        return Err(Error::InvalidConfig(format!(
            "silhouette sample cap {silhouette_max_n} must exceed the class count {}",
            data.c
        )));
    }
    let rows = stratified_subsample(data, silhouette_max_n, seed);
    let sil = if rows.len() == data.n {
        silhouette(&data.x, data.d, data.labels, data.c)
    } else {
        warnings.push(format!(
            "silhouette: computed on a stratified subsample of {} of {} points",
            rows.len(),
            data.n
        ));
        let x: Vec<f64> = rows.iter().flat_map(|&i| data.row(i).iter().copied()).collect();
        let labels: Vec<u32> = rows.iter().map(|&i| data.labels[i]).collect();
        silhouette(&x, data.d, &labels, data.c)
    };
    Ok((sil, calinski_harabasz_of(data), davies_bouldin_of(data)))
}
