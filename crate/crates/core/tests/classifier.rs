use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use tempscout_core::classifier::{
    batch_grad_weights, ce_loss, evaluate_accuracy, grad_weights, softmax_temp, train_linear,
    OptimizerKind, TrainConfig, Trainer,
};
use tempscout_core::dataset::{stratified_split, EmbeddingDataset};

/// `logsumexp(α z) - α z_y` with `z = x W`, optionally divided by α.
/// Written without the library's clamp so it is smooth everywhere.
fn oracle_loss(x: &[f64], w: &[f64], y: usize, alpha: f64, rescaled: bool) -> f64 {
    let d = x.len();
    let z: Vec<f64> = w
        .chunks_exact(d)
        .map(|col| alpha * col.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    // (z_m - z_y) + ln(1 + Σ_{c≠m} exp(z_c - z_m)) keeps full relative
    // precision when one class dominates.
    let m = (0..z.len()).max_by(|&a, &b| z[a].total_cmp(&z[b])).unwrap();
    let rest: f64 = (0..z.len()).filter(|&c| c != m).map(|c| (z[c] - z[m]).exp()).sum();
    let loss = (z[m] - z[y]) + rest.ln_1p();
    if rescaled {
        loss / alpha
    } else {
        loss
    }
}

/// Relative error between the analytic gradient and central differences
/// with step `h`.
fn gradient_error(x: &[f64], w: &[f64], y: usize, alpha: f64, rescaled: bool, h: f64) -> f64 {
    let d = x.len();
    let z: Vec<f64> = w
        .chunks_exact(d)
        .map(|col| col.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect();
    let p = softmax_temp(&z, alpha).unwrap();
    let g = grad_weights(x, &p, y, alpha, rescaled).unwrap();
    let mut wp = w.to_vec();
    let mut diff = 0.0;
    let mut norm_g = 0.0;
    let mut norm_fd = 0.0;
    for i in 0..w.len() {
        wp[i] = w[i] + h;
        let up = oracle_loss(x, &wp, y, alpha, rescaled);
        wp[i] = w[i] - h;
        let down = oracle_loss(x, &wp, y, alpha, rescaled);
        wp[i] = w[i];
        let fd = (up - down) / (2.0 * h);
        diff += (fd - g[i]).powi(2);
        norm_g += g[i] * g[i];
        norm_fd += fd * fd;
    }
    diff.sqrt() / norm_g.sqrt().max(norm_fd.sqrt()).max(f64::MIN_POSITIVE)
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}

/// Two Gaussian blobs with unit covariance and means `(±half_gap, 0)`.
fn blobs(n_per: usize, half_gap: f64, seed: u64) -> EmbeddingDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (c, m) in [half_gap, -half_gap].into_iter().enumerate() {
        for _ in 0..n_per {
            x.push((m + rng.sample::<f64, _>(StandardNormal)) as f32);
            x.push(rng.sample::<f64, _>(StandardNormal) as f32);
            y.push(c as u32);
        }
    }
    EmbeddingDataset::new("blobs", "test", x, 2, y).unwrap()
}

/// Nearest-class-mean accuracy on the validation half, means taken on train.
fn nearest_mean_accuracy(train: &EmbeddingDataset, val: &EmbeddingDataset) -> f64 {
    let d = train.dim();
    let mut means = vec![vec![0.0; d]; train.n_classes()];
    let counts = train.class_counts();
    for (row, &l) in train.rows().zip(train.labels()) {
        for k in 0..d {
            means[l as usize][k] += f64::from(row[k]) / counts[l as usize] as f64;
        }
    }
    let correct = val
        .rows()
        .zip(val.labels())
        .filter(|(row, &l)| {
            let dist = |m: &Vec<f64>| -> f64 {
                m.iter().zip(row.iter()).map(|(a, &b)| (a - f64::from(b)).powi(2)).sum()
            };
            let best = (0..means.len())
                .min_by(|&a, &b| dist(&means[a]).total_cmp(&dist(&means[b])))
                .unwrap();
            best == l as usize
        })
        .count();
    correct as f64 / val.n_samples() as f64
}

#[test]
fn separable_blobs_are_learned() {
    let ds = blobs(100, 3.0, 1);
    let split = stratified_split(&ds, 0.8, 0).unwrap();
    assert!(nearest_mean_accuracy(&split.train, &split.val) >= 0.95);
    let mut cfg = TrainConfig::default();
    cfg.alpha = 10.0;
    cfg.epochs = 50;
    cfg.batch_size = 16;
    let r = train_linear(&split, &cfg).unwrap();
    assert!(r.best_val_accuracy >= 0.95, "{}", r.best_val_accuracy);
}

#[test]
fn random_labels_stay_near_chance() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let make = |rng: &mut ChaCha8Rng, n: usize| {
        let x: Vec<f32> = (0..n * 8).map(|_| rng.sample::<f64, _>(StandardNormal) as f32).collect();
        let mut y: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
        for i in (1..n).rev() {
            y.swap(i, rng.random_range(0..=i));
        }
        EmbeddingDataset::new("noise", "test", x, 8, y).unwrap()
    };
    let train = make(&mut rng, 400);
    let test = make(&mut rng, 4000);
    let split = stratified_split(&train, 0.8, 0).unwrap();
    let mut cfg = TrainConfig::default();
    cfg.alpha = 10.0;
    cfg.epochs = 30;
    cfg.batch_size = 16;
    let r = train_linear(&split, &cfg).unwrap();
    let acc = evaluate_accuracy(&r.final_weights, &test).unwrap();
    assert!((acc - 0.5).abs() < 0.05, "{acc}");
}

#[test]
fn clamped_loss_matches_oracle_away_from_the_clamp() {
    let x = unit(vec![0.3, -0.2, 0.9]);
    let w = [0.5, 0.1, -0.2, -0.4, 0.8, 0.3];
    for alpha in [1.0, 10.0, 250.0] {
        let z: Vec<f64> = w.chunks_exact(3).map(|c| c.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        let p = softmax_temp(&z, alpha).unwrap();
        let y = if z[0] > z[1] { 0 } else { 1 };
        let lib = ce_loss(&p, y).unwrap();
        assert!((lib - oracle_loss(&x, &w, y, alpha, false)).abs() < 1e-10);
    }
}

#[test]
fn rescaled_sgd_is_plain_sgd_with_a_smaller_step() {
    let ds = blobs(60, 1.0, 2);
    for alpha in [1.0, 10.0, 250.0] {
        let mut a_cfg = TrainConfig::default();
        a_cfg.alpha = alpha;
        a_cfg.lr = 0.1;
        a_cfg.seed = 5;
        let mut b_cfg = a_cfg.clone();
        b_cfg.rescaled_loss = false;
        b_cfg.lr = 0.1 / alpha;
        let mut a = Trainer::new(&ds, &a_cfg).unwrap();
        let mut b = Trainer::new(&ds, &b_cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let batch: Vec<usize> = (0..8).map(|_| rng.random_range(0..ds.n_samples())).collect();
            a.step(&batch);
            b.step(&batch);
            for (u, v) in a.weights().data.iter().zip(&b.weights().data) {
                assert!((u - v).abs() < 1e-6, "alpha {alpha}: {u} vs {v}");
            }
        }
    }
}

#[test]
fn adam_barely_notices_the_rescaling() {
    let ds = blobs(60, 1.0, 3);
    for alpha in [10.0, 250.0] {
        let mut cfg = TrainConfig::new(OptimizerKind::Adam);
        cfg.alpha = alpha;
        cfg.seed = 1;
        let mut plain_cfg = cfg.clone();
        plain_cfg.rescaled_loss = false;
        let mut a = Trainer::new(&ds, &cfg).unwrap();
        let mut b = Trainer::new(&ds, &plain_cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let batch: Vec<usize> = (0..8).map(|_| rng.random_range(0..ds.n_samples())).collect();
            a.step(&batch);
            b.step(&batch);
        }
        let gap = a
            .weights()
            .data
            .iter()
            .zip(&b.weights().data)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-3, "alpha {alpha}: {gap}");
    }
}

#[test]
fn training_depends_only_on_the_seed() {
    let split = stratified_split(&blobs(50, 1.0, 6), 0.8, 0).unwrap();
    let mut cfg = TrainConfig::default();
    cfg.alpha = 20.0;
    cfg.epochs = 5;
    cfg.batch_size = 8;
    cfg.seed = 3;
    let a = train_linear(&split, &cfg).unwrap();
    let b = train_linear(&split, &cfg).unwrap();
    assert_eq!(a.final_weights, b.final_weights);
    assert_eq!(a.loss_history, b.loss_history);
    cfg.seed = 4;
    let c = train_linear(&split, &cfg).unwrap();
    assert_ne!(a.final_weights, c.final_weights);
}

#[test]
fn batch_gradient_is_the_mean_of_sample_gradients() {
    let xs = [unit(vec![1.0, 2.0]), unit(vec![-1.0, 0.5]), unit(vec![0.2, -3.0])].concat();
    let z = [[0.3, -0.1], [0.0, 0.4], [-0.6, 0.2]];
    let ys = [0usize, 1, 1];
    let probs: Vec<f64> = z.iter().flat_map(|z| softmax_temp(z, 7.0).unwrap()).collect();
    let g = batch_grad_weights(&xs, 2, &probs, &ys, 7.0, false).unwrap();
    let mut mean = [0.0; 4];
    for i in 0..3 {
        let gi = grad_weights(&xs[i * 2..i * 2 + 2], &probs[i * 2..i * 2 + 2], ys[i], 7.0, false).unwrap();
        for k in 0..4 {
            mean[k] += gi[k] / 3.0;
        }
    }
    for k in 0..4 {
        assert!((g[k] - mean[k]).abs() < 1e-12);
    }
}

fn instance_in(dims: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize, f64)> {
    (dims, 2usize..11, 0usize..3, any::<u64>()).prop_map(|(d, c, a, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = unit((0..d).map(|_| rng.sample(StandardNormal)).collect());
        let w: Vec<f64> = (0..c)
            .flat_map(|_| unit((0..d).map(|_| rng.sample(StandardNormal)).collect()))
            .collect();
        let y = rng.random_range(0..c);
        (x, w, y, [1.0, 10.0, 250.0][a])
    })
}

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize, f64)> {
    instance_in(2..10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // At embedding-sized d one coordinate moves a logit by α·h·x_k with
    // x_k ~ 1/√d, so h = 1e-4 stays in the linear regime even at α = 250.
    #[test]
    fn gradient_matches_finite_differences((x, w, y, alpha) in instance_in(64..513), rescaled in any::<bool>()) {
        let err = gradient_error(&x, &w, y, alpha, rescaled, 1e-4);
        prop_assert!(err < 1e-5, "alpha {} error {}", alpha, err);
    }

    // Tiny d makes single coordinates large, so the step shrinks with them.
    #[test]
    fn gradient_matches_finite_differences_in_low_dimension((x, w, y, alpha) in instance(), rescaled in any::<bool>()) {
        let err = gradient_error(&x, &w, y, alpha, rescaled, 1e-6);
        prop_assert!(err < 1e-5, "alpha {} error {}", alpha, err);
    }

    #[test]
    fn softmax_is_a_distribution_with_the_same_argmax(
        z in proptest::collection::vec(-1.0f64..1.0, 2..12),
        alpha in 0.5f64..250.0,
    ) {
        let p = softmax_temp(&z, alpha).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let arg = |v: &[f64]| (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        prop_assert_eq!(z[arg(&p)], z[arg(&z)]);
    }
}
