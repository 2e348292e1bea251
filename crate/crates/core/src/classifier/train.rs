//! Training of the bias-free cosine classifier.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::optim::{Adam, Optimizer, OptimizerKind, Sgd};
use super::softmax::{accumulate_grad, argmax, softmax_into, LOG_CLAMP};
use crate::dataset::{EmbeddingDataset, SplitDataset};
use crate::error::{Error, Result};
use crate::seeds::{self, Rng};

/// Class weight vectors stored column by column: `data[c * d + k]` is `W[k, c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub d: usize,
    pub c: usize,
    pub data: Vec<f64>,
    pub normalized: bool,
}

impl Weights {
    /// Gaussian columns scaled to unit norm.
    pub fn init(d: usize, c: usize, seed: u64) -> Self {
        let mut rng = seeds::rng(seed, seeds::stream::INIT);
        let data: Vec<f64> = (0..d * c).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut w = Self {
            d,
            c,
            data,
            normalized: false,
        };
        w.project();
        w
    }

    pub fn from_columns(d: usize, columns: &[Vec<f64>]) -> Result<Self> {
        if columns.iter().any(|col| col.len() != d) {
            return Err(Error::ShapeMismatch("weight column length differs from d".into()));
        }
        Ok(Self {
            d,
            c: columns.len(),
            data: columns.concat(),
            normalized: false,
        })
    }

    pub fn column(&self, c: usize) -> &[f64] {
        &self.data[c * self.d..(c + 1) * self.d]
    }

    /// Rescales every column to unit L2 norm. Zero columns are left alone and
    /// clear the `normalized` flag.
    pub fn project(&mut self) {
        let mut ok = true;
        for col in self.data.chunks_exact_mut(self.d) {
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 && norm.is_finite() {
                col.iter_mut().for_each(|v| *v /= norm);
            } else {
                ok = false;
            }
        }
        self.normalized = ok;
    }

    /// Cosine logits `x · w_c` for a unit row.
    pub fn logits_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, col) in out.iter_mut().zip(self.data.chunks_exact(self.d)) {
            *o = col.iter().zip(x).map(|(w, v)| w * v).sum();
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let mut z = vec![0.0; self.c];
        self.logits_into(x, &mut z);
        argmax(&z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Inverse temperature α = 1/T.
    pub alpha: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub optimizer: OptimizerKind,
    pub rescaled_loss: bool,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
}

impl TrainConfig {
    pub fn new(optimizer: OptimizerKind) -> Self {
        Self {
            alpha: 1.0,
            epochs: 100,
            batch_size: 2048,
            lr: optimizer.default_lr(),
            optimizer,
            rescaled_loss: true,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if self.epochs == 0 {
            return bad("epochs must be >= 1".into());
        }
        if self.batch_size == 0 {
            return bad("batch_size must be >= 1".into());
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("lr must be > 0, got {}", self.lr));
        }
        if self.optimizer == OptimizerKind::Adam {
            if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
                return bad("adam betas must lie in [0, 1)".into());
            }
            if self.adam_eps <= 0.0 {
                return bad("adam_eps must be > 0".into());
            }
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::new(OptimizerKind::Sgd)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainRunResult {
    pub final_weights: Weights,
    pub best_val_accuracy: f64,
    pub accuracy_history: Vec<f64>,
    pub loss_history: Vec<f64>,
    pub diverged: bool,
}

/// Unit-normalized rows of a dataset as `f64`.
pub(crate) fn unit_rows(ds: &EmbeddingDataset) -> Vec<f64> {
    let mut out = Vec::with_capacity(ds.values().len());
    for row in ds.rows() {
        let norm = row
            .iter()
            .map(|&v| f64::from(v) * f64::from(v))
            .sum::<f64>()
            .sqrt();
        out.extend(row.iter().map(|&v| f64::from(v) / norm));
    }
    out
}

/// Step-level trainer. `train_linear` drives it epoch by epoch; tests use it
/// to compare weight trajectories.
pub struct Trainer {
    cfg: TrainConfig,
    x: Vec<f64>,
    y: Vec<usize>,
    d: usize,
    weights: Weights,
    optimizer: Box<dyn Optimizer + Send>,
    shuffle: Rng,
    order: Vec<usize>,
    grad: Vec<f64>,
    logits: Vec<f64>,
    probs: Vec<f64>,
}

impl Trainer {
    pub fn new(train: &EmbeddingDataset, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let d = train.dim();
        let c = train.n_classes();
        let weights = Weights::init(d, c, cfg.seed);
        let optimizer: Box<dyn Optimizer + Send> = match cfg.optimizer {
            OptimizerKind::Sgd => Box::new(Sgd { lr: cfg.lr }),
            OptimizerKind::Adam => Box::new(Adam::new(
                cfg.lr,
                cfg.adam_beta1,
                cfg.adam_beta2,
                cfg.adam_eps,
                d * c,
            )),
        };
        Ok(Self {
            cfg: cfg.clone(),
            x: unit_rows(train),
            y: train.labels().iter().map(|&l| l as usize).collect(),
            d,
            weights,
            optimizer,
            shuffle: seeds::rng(cfg.seed, seeds::stream::SHUFFLE),
            order: (0..train.n_samples()).collect(),
            grad: vec![0.0; d * c],
            logits: vec![0.0; c],
            probs: vec![0.0; c],
        })
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn into_weights(self) -> Weights {
        self.weights
    }

    /// One optimizer step on the given rows; returns the summed batch loss.
    pub fn step(&mut self, batch: &[usize]) -> f64 {
        let alpha = self.cfg.alpha;
        let scale = 1.0 / batch.len() as f64;
        self.grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        for &i in batch {
            let x = &self.x[i * self.d..(i + 1) * self.d];
            let y = self.y[i];
            self.weights.logits_into(x, &mut self.logits);
            softmax_into(&self.logits, alpha, &mut self.probs);
            loss += -self.probs[y].max(LOG_CLAMP).ln();
            accumulate_grad(x, &self.probs, y, scale, &mut self.grad);
        }
        if self.cfg.rescaled_loss {
            loss /= alpha;
        } else {
            self.grad.iter_mut().for_each(|g| *g *= alpha);
        }
        self.optimizer.step(&mut self.weights.data, &self.grad);
        self.weights.project();
        loss
    }

    /// A full shuffled pass; returns the mean per-sample loss.
    pub fn epoch(&mut self) -> f64 {
        let mut order = std::mem::take(&mut self.order);
        order.shuffle(&mut self.shuffle);
        let mut total = 0.0;
        for batch in order.chunks(self.cfg.batch_size) {
            total += self.step(batch);
        }
        let n = order.len();
        self.order = order;
        total / n as f64
    }
}

/// Trains on `split.train`, tracking validation accuracy after every epoch.
pub fn train_linear(split: &SplitDataset, cfg: &TrainConfig) -> Result<TrainRunResult> {
    if split.train.dim() != split.val.dim() {
        return Err(Error::ShapeMismatch("train and val dimensions differ".into()));
    }
    let mut trainer = Trainer::new(&split.train, cfg)?;
    let val_x = unit_rows(&split.val);
    let val_y = split.val.labels();

    let mut accuracy_history = Vec::with_capacity(cfg.epochs);
    let mut loss_history = Vec::with_capacity(cfg.epochs);
    let mut diverged = false;
    for _ in 0..cfg.epochs {
        let loss = trainer.epoch();
        if !loss.is_finite() {
            diverged = true;
            break;
        }
        loss_history.push(loss);
        accuracy_history.push(accuracy_on(trainer.weights(), &val_x, val_y));
    }
    let best_val_accuracy = if accuracy_history.is_empty() {
        0.0
    } else {
        accuracy_history.iter().copied().fold(f64::MIN, f64::max)
    };
    Ok(TrainRunResult {
        final_weights: trainer.into_weights(),
        best_val_accuracy,
        accuracy_history,
        loss_history,
        diverged,
    })
}

/// Top-1 accuracy of cosine logits on unit rows. Temperature plays no role:
/// softmax preserves the argmax.
pub fn accuracy_on(w: &Weights, unit_rows: &[f64], labels: &[u32]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let mut z = vec![0.0; w.c];
    let correct = unit_rows
        .chunks_exact(w.d)
        .zip(labels)
        .filter(|(x, &y)| {
            w.logits_into(x, &mut z);
            argmax(&z) == y as usize
        })
        .count();
    correct as f64 / labels.len() as f64
}

pub fn evaluate_accuracy(w: &Weights, ds: &EmbeddingDataset) -> Result<f64> {
    if w.d != ds.dim() {
        return Err(Error::ShapeMismatch(format!(
            "weights have d = {}, dataset has d = {}",
            w.d,
            ds.dim()
        )));
    }
    Ok(accuracy_on(w, &unit_rows(ds), ds.labels()))
}
