//! Softmax temperature search for linear classifiers on fixed embeddings,
//! dataset meta-statistics, and a regression heuristic that predicts the best
//! temperature from those statistics.

pub mod classifier;
pub mod dataset;
pub mod error;
pub mod heuristic;
pub mod seeds;
pub mod stats;
pub mod sweep;
pub mod synth;

pub use error::{Error, ErrorKind, Result};

/// Version stamped into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
