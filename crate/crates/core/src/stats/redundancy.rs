use super::Data;
use crate::dataset::EmbeddingDataset;

/// Returns `(feats_corr, feats_cos_sim)` plus warnings.
///
/// `feats_corr` is the mean over all entries of `(R - I)²`, R being the
/// Pearson correlation matrix of the non-constant columns. `feats_cos_sim`
/// is the mean cosine similarity over unordered column pairs (0 when d = 1).
pub fn feature_redundancy(ds: &EmbeddingDataset) -> (f64, f64, Vec<String>) {
    let mut warnings = Vec::new();
    let (corr, cos) = feature_redundancy_of(&Data::new(ds), &mut warnings);
    (corr, cos, warnings)
}

pub(crate) fn feature_redundancy_of(data: &Data<'_>, warnings: &mut Vec<String>) -> (f64, f64) {
    let d = data.d;
    let n = data.n as f64;
    let means = data.column_means();
    let vars = data.column_variances();
    let kept: Vec<usize> = (0..d).filter(|&j| vars[j] > 0.0).collect();
    if kept.len() < d {
        let dropped: Vec<usize> = (0..d).filter(|&j| vars[j] == 0.0).collect();
        warnings.push(format!(
            "feats_corr: zero-variance dimensions {dropped:?} excluded"
        ));
    }

    // Cross-products of centered and raw columns in one pass.
    let mut centered = vec![0.0; d * d];
    let mut raw = vec![0.0; d * d];
    for row in data.x.chunks_exact(d) {
        for a in 0..d {
            let ca = row[a] - means[a];
            let ra = row[a];
            for b in a..d {
                centered[a * d + b] += ca * (row[b] - means[b]);
                raw[a * d + b] += ra * row[b];
            }
        }
    }

    let k = kept.len();
    let mut sq = 0.0;
    for (ia, &a) in kept.iter().enumerate() {
        for &b in &kept[ia + 1..] {
            let cov = centered[a * d + b] / n;
            let r = cov / (vars[a] * vars[b]).sqrt();
            sq += 2.0 * r * r;
        }
    }
    let feats_corr = if k == 0 { 0.0 } else { sq / (k * k) as f64 };

    let feats_cos_sim = if d < 2 {
        warnings.push("feats_cos_sim: a single dimension has no pairs, set to 0".into());
        0.0
    } else {
        let mut sum = 0.0;
        let mut pairs = 0usize;
        let mut zero_cols = false;
        for a in 0..d {
            for b in a + 1..d {
                let denom = (raw[a * d + a] * raw[b * d + b]).sqrt();
                if denom == 0.0 {
                    zero_cols = true;
                    continue;
                }
                sum += raw[a * d + b] / denom;
                pairs += 1;
            }
        }
        if zero_cols {
            warnings.push("feats_cos_sim: all-zero columns skipped".into());
        }
        if pairs == 0 {
            0.0
        } else {
            sum / pairs as f64
        }
    };
    (feats_corr, feats_cos_sim)
}
