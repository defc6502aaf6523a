use serde::{Deserialize, Serialize};

use super::GbdtError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Splitter {
    /// Thresholds restricted to precomputed quantile bin boundaries.
    #[default]
    Histogram,
    /// Every midpoint between consecutive distinct values in a node.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    pub n_histogram_bins: usize,
    pub subsample: f64,
    pub early_stopping_rounds: Option<usize>,
    pub seed: u64,
    pub splitter: Splitter,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            n_trees: 500,
            max_depth: 6,
            learning_rate: 0.05,
            min_samples_leaf: 20,
            n_histogram_bins: 256,
            subsample: 1.0,
            early_stopping_rounds: None,
            seed: 0,
            splitter: Splitter::Histogram,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<(), GbdtError> {
        let bad = |msg: &str| Err(GbdtError::InvalidParams(msg.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad("subsample must lie in (0, 1]");
        }
        if self.max_depth == 0 || self.max_depth > 30 {
            return bad("max_depth must lie in 1..=30");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be at least 1");
        }
        if !(2..=256).contains(&self.n_histogram_bins) {
            return bad("n_histogram_bins must lie in 2..=256");
        }
        if self.early_stopping_rounds == Some(0) {
            return bad("early_stopping_rounds must be positive when set");
        }
        Ok(())
    }
}
