use super::{sq_dist, Data};
use crate::dataset::EmbeddingDataset;

/// Returns `(sb_trace, sw_trace)` plus warnings.
///
/// `sb_trace` is `(1/C) Σ_c tr(Cov_c)`; a singleton class contributes a zero
/// covariance. `sw_trace` is `(1/C) Σ_c |μ_c - μ|²` with μ the global mean.
pub fn scatter_traces(ds: &EmbeddingDataset) -> (f64, f64, Vec<String>) {
    let mut warnings = Vec::new();
    let (sb, sw) = scatter_traces_of(&Data::new(ds), &mut warnings);
    (sb, sw, warnings)
}

pub(crate) fn scatter_traces_of(data: &Data<'_>, warnings: &mut Vec<String>) -> (f64, f64) {
    let (centroids, counts) = data.centroids();
    let d = data.d;
    let mut within = vec![0.0; data.c];
    for (i, &l) in data.labels.iter().enumerate() {
        let l = l as usize;
        within[l] += sq_dist(data.row(i), &centroids[l * d..(l + 1) * d]);
    }
    let mut sb = 0.0;
    for (class, (&w, &n)) in within.iter().zip(&counts).enumerate() {
        if n < 2 {
            warnings.push(format!(
                "sb_trace: class {class} has a single sample, its covariance is taken as zero"
            ));
            continue;
        }
        sb += w / n as f64;
    }
    sb /= data.c as f64;

    let global = data.column_means();
    let sw = centroids
        .chunks_exact(d)
        .map(|mu| sq_dist(mu, &global))
        .sum::<f64>()
        / data.c as f64;
    (sb, sw)
}
