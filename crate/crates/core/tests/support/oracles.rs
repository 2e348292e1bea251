//! Naive reference implementations of the dataset statistics, written loop
//! by loop and independent of the library code. Shared by the statistics
//! tests and the acceptance suite.

#![allow(dead_code)]

use statrs::distribution::{ContinuousCDF, Normal};
use tempscout_core::dataset::EmbeddingDataset;

pub fn as_f64(ds: &EmbeddingDataset) -> Vec<Vec<f64>> {
    ds.rows().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}


pub fn naive_mean_cov(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mut mean = vec![0.0; d];
    for r in rows {
        for k in 0..d {
            mean[k] += r[k] / n;
        }
    }
    let mut cov = vec![vec![0.0; d]; d];
    for r in rows {
        for a in 0..d {
            for b in 0..d {
                cov[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]) / n;
            }
        }
    }
    (mean, cov)
}

pub fn naive_classes(ds: &EmbeddingDataset) -> Vec<Vec<Vec<f64>>> {
    let rows = as_f64(ds);
    (0..ds.n_classes())
        .map(|c| {
            rows.iter()
                .zip(ds.labels())
                .filter(|(_, &l)| l as usize == c)
                .map(|(r, _)| r.clone())
                .collect()
        })
        .collect()
}

pub fn naive_scatter(ds: &EmbeddingDataset) -> (f64, f64) {
    let classes = naive_classes(ds);
    let c = classes.len() as f64;
    let (global, _) = naive_mean_cov(&as_f64(ds));
    let mut sb = 0.0;
    let mut means = Vec::new();
    for members in &classes {
        let (m, cov) = naive_mean_cov(members);
        sb += (0..cov.len()).map(|k| cov[k][k]).sum::<f64>() / c;
        means.push(m);
    }
    let sw = means
        .iter()
        .map(|m| m.iter().zip(&global).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
        .sum::<f64>()
        / c;
    (sb, sw)
}

pub fn naive_silhouette(rows: &[Vec<f64>], labels: &[u32], c: usize) -> f64 {
    let n = rows.len();
    let mut total = 0.0;
    for i in 0..n {
        let mut sum = vec![0.0; c];
        let mut cnt = vec![0usize; c];
        for j in 0..n {
            if i != j {
                sum[labels[j] as usize] += dist(&rows[i], &rows[j]);
                cnt[labels[j] as usize] += 1;
            }
        }
        let own = labels[i] as usize;
        if cnt[own] == 0 {
            continue;
        }
        let a = sum[own] / cnt[own] as f64;
        let mut b = f64::INFINITY;
        for k in 0..c {
            if k != own && cnt[k] > 0 {
                b = b.min(sum[k] / cnt[k] as f64);
            }
        }
        total += (b - a) / a.max(b);
    }
    total / n as f64
}

pub fn naive_ch(ds: &EmbeddingDataset) -> f64 {
    let rows = as_f64(ds);
    let classes = naive_classes(ds);
    let (global, _) = naive_mean_cov(&rows);
    let (mut b, mut w) = (0.0, 0.0);
    for members in &classes {
        let (m, _) = naive_mean_cov(members);
        b += members.len() as f64 * dist(&m, &global).powi(2);
        for r in members {
            w += dist(r, &m).powi(2);
        }
    }
    let n = rows.len() as f64;
    let c = classes.len() as f64;
    (b / (c - 1.0)) / (w / (n - c))
}

pub fn naive_db(ds: &EmbeddingDataset) -> f64 {
    let classes = naive_classes(ds);
    let means: Vec<Vec<f64>> = classes.iter().map(|m| naive_mean_cov(m).0).collect();
    let s: Vec<f64> = classes
        .iter()
        .zip(&means)
        .map(|(members, m)| members.iter().map(|r| dist(r, m)).sum::<f64>() / members.len() as f64)
        .collect();
    let c = classes.len();
    let mut total = 0.0;
    for i in 0..c {
        let mut worst: f64 = 0.0;
        for j in 0..c {
            if i != j {
                worst = worst.max((s[i] + s[j]) / dist(&means[i], &means[j]));
            }
        }
        total += worst;
    }
    total / c as f64
}

/// Cyclic Jacobi rotations; eigenvalues of a symmetric matrix.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

pub fn naive_pca(ds: &EmbeddingDataset) -> Vec<f64> {
    let (_, cov) = naive_mean_cov(&as_f64(ds));
    let mut ev = jacobi_eigenvalues(cov);
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let total: f64 = ev.iter().sum();
    let d = ev.len();
    [0.5, 0.75, 0.8, 0.9, 0.95, 0.99]
        .iter()
        .map(|&t| {
            let mut acc = 0.0;
            for (k, v) in ev.iter().enumerate() {
                acc += v;
                if acc >= t * total * (1.0 - 1e-10) {
                    return (k + 1) as f64 / d as f64;
                }
            }
            1.0
        })
        .collect()
}

pub fn naive_kurtosis(ds: &EmbeddingDataset) -> f64 {
    let rows = as_f64(ds);
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut total = 0.0;
    for k in 0..d {
        let mean = rows.iter().map(|r| r[k]).sum::<f64>() / n;
        let m2 = rows.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / n;
        let m4 = rows.iter().map(|r| (r[k] - mean).powi(4)).sum::<f64>() / n;
        total += m4 / (m2 * m2) - 3.0;
    }
    total / d as f64
}

pub fn naive_redundancy(ds: &EmbeddingDataset) -> (f64, f64) {
    let rows = as_f64(ds);
    let (_, cov) = naive_mean_cov(&rows);
    let d = cov.len();
    let mut sq = 0.0;
    for a in 0..d {
        for b in 0..d {
            let r = cov[a][b] / (cov[a][a] * cov[b][b]).sqrt();
            let target = if a == b { 1.0 } else { 0.0 };
            sq += (r - target).powi(2);
        }
    }
    let mut cos = 0.0;
    let mut pairs = 0.0;
    for a in 0..d {
        for b in a + 1..d {
            let dot: f64 = rows.iter().map(|r| r[a] * r[b]).sum();
            let na: f64 = rows.iter().map(|r| r[a] * r[a]).sum::<f64>().sqrt();
            let nb: f64 = rows.iter().map(|r| r[b] * r[b]).sum::<f64>().sqrt();
            cos += dot / (na * nb);
            pairs += 1.0;
        }
    }
    (sq / (d * d) as f64, cos / pairs)
}

/// Shapiro-Wilk W with Royston's coefficients, built from the full
/// antisymmetric coefficient vector.
pub fn naive_shapiro(values: &[f64]) -> f64 {
    let mut x = values.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len();
    let mut a = vec![0.0; n];
    if n == 3 {
        a[0] = -(0.5f64).sqrt();
        a[2] = (0.5f64).sqrt();
    } else {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let m: Vec<f64> = (1..=n)
            .map(|i| normal.inverse_cdf((i as f64 - 0.375) / (n as f64 + 0.25)))
            .collect();
        let mm: f64 = m.iter().map(|v| v * v).sum();
        let u = 1.0 / (n as f64).sqrt();
        let an = m[n - 1] / mm.sqrt() + 0.221157 * u - 0.147981 * u.powi(2) - 2.071190 * u.powi(3)
            + 4.434685 * u.powi(4)
            - 2.706056 * u.powi(5);
        a[n - 1] = an;
        a[0] = -an;
        if n > 5 {
            let an1 = m[n - 2] / mm.sqrt() + 0.042981 * u - 0.293762 * u.powi(2)
                - 1.752461 * u.powi(3)
                + 5.682633 * u.powi(4)
                - 3.582633 * u.powi(5);
            a[n - 2] = an1;
            a[1] = -an1;
            let phi = (mm - 2.0 * m[n - 1].powi(2) - 2.0 * m[n - 2].powi(2))
                / (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
            for i in 2..n - 2 {
                a[i] = m[i] / phi.sqrt();
            }
        } else {
            let phi = (mm - 2.0 * m[n - 1].powi(2)) / (1.0 - 2.0 * an * an);
            for i in 1..n - 1 {
                a[i] = m[i] / phi.sqrt();
            }
        }
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let num: f64 = a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
    let den: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    num * num / den
}

pub fn naive_normality(ds: &EmbeddingDataset) -> f64 {
    let rows = as_f64(ds);
    let d = rows[0].len();
    let total: f64 = (0..d)
        .map(|k| naive_shapiro(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .sum();
    total / d as f64
}

/// Every statistic in the library's order, for datasets small enough that no
/// subsampling happens and with no constant dimension.
pub fn naive_stats(ds: &EmbeddingDataset) -> Vec<(&'static str, f64)> {
    let rows = as_f64(ds);
    let n = rows.len() as f64;
    let d = rows[0].len() as f64;
    let mut seen: Vec<u32> = ds.labels().to_vec();
    seen.sort_unstable();
    seen.dedup();
    let c = seen.len() as f64;
    let all: Vec<f64> = rows.iter().flatten().copied().collect();
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / all.len() as f64;
    let (sb, sw) = naive_scatter(ds);
    let (corr, cos) = naive_redundancy(ds);
    let pca = naive_pca(ds);
    vec![
        ("dim", d),
        ("n_classes", c),
        ("n_samples", n),
        ("avg_samp_class", n / c),
        ("mean", mean),
        ("var", var),
        ("train_mean", mean),
        ("train_std", var.sqrt()),
        ("sb_trace", sb),
        ("sw_trace", sw),
        ("feats_corr", corr),
        ("feats_cos_sim", cos),
        ("pca_50", pca[0]),
        ("pca_75", pca[1]),
        ("pca_80", pca[2]),
        ("pca_90", pca[3]),
        ("pca_95", pca[4]),
        ("pca_99", pca[5]),
        ("avg_kurtosis", naive_kurtosis(ds)),
        ("avg_normality", naive_normality(ds)),
        ("silhouette", naive_silhouette(&rows, ds.labels(), c as usize)),
        ("calinski_harabasz", naive_ch(ds)),
        ("davies_bouldin", naive_db(ds)),
    ]
}
