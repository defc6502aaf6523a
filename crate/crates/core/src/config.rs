//! Pipeline configuration (TOML). Unknown keys are rejected.
//!
//! ```toml
//! seed = 0
//! ratios = [0.8, 0.1, 0.1]
//! ki_bounds = [1e-3, 1e10]   # nM
//! workers = 0                # 0 = one per core
//! histogram_bin_width = 0.5
//!
//! [fingerprint]
//! radius = 2
//! nbits = 2048
//!
//! [gbdt]
//! n_trees = 500
//! max_depth = 6
//! learning_rate = 0.05
//! min_samples_leaf = 20
//!
//! [evaluation]
//! threshold = 4.0
//! bin_edges = [-2.0, -1.5, ...]
//!
//! [paths]
//! property_table = "my_scales.csv"   # relative to this file
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::{split_counts, KiBounds};
use crate::eval::{default_bin_edges, DEFAULT_THRESHOLD};
use crate::gbdt::TrainParams;
use crate::ligand::{DEFAULT_NBITS, DEFAULT_RADIUS};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerprintConfig {
    pub radius: u32,
    pub nbits: u32,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        FingerprintConfig { radius: DEFAULT_RADIUS, nbits: DEFAULT_NBITS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub threshold: f64,
    pub bin_edges: Vec<f64>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig { threshold: DEFAULT_THRESHOLD, bin_edges: default_bin_edges() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Residue property table replacing the built-in one.
    pub property_table: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub ratios: [f64; 3],
    pub ki_bounds: [f64; 2],
    pub workers: usize,
    pub histogram_bin_width: f64,
    pub fingerprint: FingerprintConfig,
    pub gbdt: TrainParams,
    pub evaluation: EvaluationConfig,
    pub paths: PathsConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let bounds = KiBounds::default();
        PipelineConfig {
            seed: 0,
            ratios: [0.8, 0.1, 0.1],
            ki_bounds: [bounds.min, bounds.max],
            workers: 0,
            histogram_bin_width: 0.5,
            fingerprint: FingerprintConfig::default(),
            gbdt: TrainParams::default(),
            evaluation: EvaluationConfig::default(),
            paths: PathsConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse { path: "<config>".into(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads and validates; a relative property table path is resolved
    /// against the config file's directory.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), source: e })?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse { path: path.display().to_string(), message },
            other => other,
        })?;
        if let Some(p) = &cfg.paths.property_table {
            if p.is_relative() {
                cfg.paths.property_table = Some(path.parent().unwrap_or(Path::new(".")).join(p));
            }
        }
        Ok(cfg)
    }

    pub fn ki_bounds(&self) -> KiBounds {
        KiBounds { min: self.ki_bounds[0], max: self.ki_bounds[1] }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        split_counts(0, &self.ratios).map_err(|e| invalid(&e))?;
        self.ki_bounds().validate().map_err(|e| invalid(&e))?;
        self.gbdt.validate().map_err(|e| invalid(&e))?;
        let fp = &self.fingerprint;
        if !fp.nbits.is_power_of_two() {
            return Err(ConfigError::Invalid(format!("fingerprint.nbits must be a power of two, got {}", fp.nbits)));
        }
        if fp.radius > 8 {
            return Err(ConfigError::Invalid(format!("fingerprint.radius must be at most 8, got {}", fp.radius)));
        }
        if !(self.histogram_bin_width > 0.0 && self.histogram_bin_width.is_finite()) {
            return Err(ConfigError::Invalid("histogram_bin_width must be positive".into()));
        }
        let ev = &self.evaluation;
        if !ev.threshold.is_finite() {
            return Err(ConfigError::Invalid("evaluation.threshold must be finite".into()));
        }
        if ev.bin_edges.len() < 2 || ev.bin_edges.iter().any(|e| !e.is_finite()) || ev.bin_edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Invalid("evaluation.bin_edges must be finite and strictly increasing".into()));
        }
        Ok(())
    }

    /// Canonical TOML rendering, echoed next to outputs.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical rendering.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}
