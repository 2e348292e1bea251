use tempscout_core::classifier::TrainConfig;
use tempscout_core::dataset::stratified_split;
use tempscout_core::sweep::{
    best_temperature, emit_curve, read_curve, read_sweep, run_sweep, sidecar_path, AlphaPoint,
    SweepResult, TemperatureGrid, CURVE_HEADER,
};
use tempscout_core::synth::{generate, SynthSpec};

fn spec(n_classes: usize, sep: f64, std: f64, seed: u64) -> SynthSpec {
    SynthSpec {
        n_classes,
        dim: 8,
        samples_per_class: 40,
        mean_separation: sep,
        within_std: std,
        feature_duplication: 0,
        shared_factor_std: 0.0,
        shared_factor_mean: 0.0,
        seed,
        name: None,
    }
}

fn template() -> TrainConfig {
    let mut cfg = TrainConfig::default();
    cfg.epochs = 15;
    cfg.batch_size = 16;
    cfg.seed = 2;
    cfg
}

#[test]
fn bookkeeping() {
    let split = stratified_split(&generate(&spec(3, 4.0, 1.0, 1)).unwrap(), 0.8, 0).unwrap();
    let grid = TemperatureGrid::new(vec![1.0, 10.0]).unwrap();
    let sr = run_sweep(&split, &grid, &template(), 2).unwrap();
    assert_eq!(sr.per_alpha.len(), 2);
    assert!(sr.per_alpha.iter().all(|p| p.n_repeats == 2));
    assert_eq!(sr.per_alpha[0].alpha, 1.0);
    assert_eq!(sr.per_alpha[1].alpha, 10.0);
    assert!(grid.values().contains(&sr.optimal_alpha));
    assert!(run_sweep(&split, &grid, &template(), 0).is_err());
}

#[test]
fn separable_data_is_learned_at_every_alpha() {
    let split = stratified_split(&generate(&spec(3, 12.0, 1.0, 2)).unwrap(), 0.8, 0).unwrap();
    let grid = TemperatureGrid::new(vec![1.0, 5.0, 50.0, 250.0]).unwrap();
    let sr = run_sweep(&split, &grid, &template(), 2).unwrap();
    for p in &sr.per_alpha {
        assert!(p.acc_mean >= 0.9, "alpha {} acc {}", p.alpha, p.acc_mean);
    }
    assert!(grid.values().contains(&sr.optimal_alpha));
}

#[test]
fn same_seed_same_result() {
    let split = stratified_split(&generate(&spec(4, 2.0, 1.0, 3)).unwrap(), 0.8, 0).unwrap();
    let grid = TemperatureGrid::new(vec![1.0, 20.0, 100.0]).unwrap();
    let a = run_sweep(&split, &grid, &template(), 3).unwrap();
    let b = run_sweep(&split, &grid, &template(), 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn overlapping_classes_give_a_curve_that_moves() {
    let split = stratified_split(&generate(&spec(5, 1.0, 1.0, 4)).unwrap(), 0.8, 0).unwrap();
    let sr = run_sweep(&split, &TemperatureGrid::parse("5:250:35", true).unwrap(), &template(), 2)
        .unwrap();
    let accs: Vec<f64> = sr.per_alpha.iter().map(|p| p.acc_mean).collect();
    let spread = accs.iter().copied().fold(f64::MIN, f64::max)
        - accs.iter().copied().fold(f64::MAX, f64::min);
    assert!(spread > 0.01, "{accs:?}");
}

fn handmade(points: &[(f64, f64, bool)]) -> SweepResult {
    let per_alpha: Vec<AlphaPoint> = points
        .iter()
        .map(|&(alpha, acc_mean, any_diverged)| AlphaPoint {
            alpha,
            acc_mean,
            acc_std: 0.012345678,
            n_repeats: 3,
            any_diverged,
        })
        .collect();
    let mut sr = SweepResult {
        dataset_name: "hand".into(),
        extractor: "made".into(),
        per_alpha,
        optimal_alpha: 0.0,
    };
    sr.optimal_alpha = best_temperature(&sr).unwrap();
    sr
}

#[test]
fn ties_go_to_the_smallest_alpha() {
    let sr = handmade(&[(1.0, 0.5), (5.0, 0.8), (10.0, 0.8), (15.0, 0.7)].map(|(a, b)| (a, b, false)));
    assert_eq!(sr.optimal_alpha, 5.0);
}

#[test]
fn curve_round_trip_and_diverged_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let sr = handmade(&[(1.0, 0.1234567891, false), (250.0, 1.0 / 3.0, true)]);
    emit_curve(&sr, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CURVE_HEADER);
    assert!(lines[2].ends_with(",true"));
    assert!(sidecar_path(&path).exists());

    let back = read_curve(&path).unwrap();
    for (a, b) in back.iter().zip(&sr.per_alpha) {
        assert_eq!(a.alpha, b.alpha);
        assert!((a.acc_mean - b.acc_mean).abs() <= 1e-6 * b.acc_mean.abs());
        assert!((a.acc_std - b.acc_std).abs() <= 1e-6 * b.acc_std.abs());
        assert_eq!(a.n_repeats, b.n_repeats);
        assert_eq!(a.any_diverged, b.any_diverged);
    }
    let full = read_sweep(&path).unwrap();
    assert_eq!(full.optimal_alpha, sr.optimal_alpha);
    assert_eq!(full.dataset_name, "hand");
}

#[test]
fn default_grid() {
    let g = TemperatureGrid::standard();
    assert_eq!(g.len(), 51);
    let mut expected = vec![1.0];
    expected.extend((1..=50).map(|k| 5.0 * k as f64));
    assert_eq!(g.values(), expected.as_slice());
    assert_eq!(TemperatureGrid::parse("5:250:5", true).unwrap(), g);
}
