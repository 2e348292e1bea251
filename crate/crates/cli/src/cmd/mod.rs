pub mod fit;
pub mod gen;
pub mod predict;
pub mod report;
pub mod stats;
pub mod sweep;

use serde::{Deserialize, Serialize};
use tempscout_core::heuristic::HeuristicModel;
use tempscout_core::stats::{StatVector, StatsConfig};

/// Suffix of the per-dataset records written by `sweep` and read by `fit`
/// and `report`.
pub const OBSERVATION_SUFFIX: &str = ".observation.json";

/// One (statistics, optimal α) record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObservationFile {
    pub schema_version: u32,
    pub dataset_name: String,
    pub extractor: String,
    pub optimal_alpha: f64,
    /// Smallest and largest α of the sweep grid.
    pub alpha_range: (f64, f64),
    /// Curve CSV, relative to this file's directory.
    pub curve: String,
    pub stats_config: StatsConfig,
    pub stats: StatVector,
    pub stats_warnings: Vec<String>,
}

/// A fitted model plus the statistics settings its inputs were computed with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub model: HeuristicModel,
    pub stats_config: StatsConfig,
}
