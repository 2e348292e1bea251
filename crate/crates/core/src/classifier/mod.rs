//! Temperature-scaled cosine classifier: softmax, (rescaled) cross-entropy,
//! exact gradients, optimizers and the training loop.

mod optim;
mod softmax;
mod train;

pub use optim::{Adam, Optimizer, OptimizerKind, Sgd};
pub use softmax::{
    batch_grad_weights, ce_loss, grad_weights, normalize_rows, rescaled_ce_loss, softmax_temp,
    LOG_CLAMP,
};
pub use train::{
    accuracy_on, evaluate_accuracy, train_linear, TrainConfig, TrainRunResult, Trainer, Weights,
};
