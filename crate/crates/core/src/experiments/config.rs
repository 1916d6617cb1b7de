use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assoc::{MemoryMode, DEFAULT_REJECT_THRESHOLD};
use crate::capacity::NoiseTarget;
use crate::error::{Error, Result};
use crate::scalar::EncoderKind;

/// Every experiment knob. Loaded from a TOML file, then overridden by CLI
/// flags; fields missing from the file keep their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dim: usize,
    pub levels: usize,
    pub lambda: f64,
    pub encoder: EncoderKind,

    pub grid_width: u16,
    pub grid_height: u16,
    pub interval_us: u64,
    /// Events per second along the moving edge.
    pub event_rate: f64,
    pub velocity_bins: usize,
    pub velocity_min: f64,
    pub velocity_max: f64,

    pub trials: usize,
    pub n_max: usize,
    pub odd_only: bool,
    pub p_values: Vec<f64>,
    pub noise_target: NoiseTarget,

    /// Memory mode for `sensorimotor`; both modes when unset.
    pub mode: Option<MemoryMode>,
    pub stored_counts: Vec<usize>,
    pub reject_threshold: f64,

    pub sequence_len: usize,
    pub codebook_size: usize,

    pub bloom_k: usize,
    pub bloom_inserted: usize,
    pub bloom_queries: usize,

    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            dim: 8192,
            levels: 26,
            lambda: 0.03,
            encoder: EncoderKind::Nonlinear,
            grid_width: 32,
            grid_height: 32,
            interval_us: 50_000,
            event_rate: 20_000.0,
            velocity_bins: 21,
            velocity_min: -300.0,
            velocity_max: 300.0,
            trials: 100,
            n_max: 51,
            odd_only: true,
            p_values: vec![0.0, 0.1, 0.2, 0.3],
            noise_target: NoiseTarget::Component,
            mode: None,
            stored_counts: vec![1, 5, 11, 21, 51],
            reject_threshold: DEFAULT_REJECT_THRESHOLD,
            sequence_len: 5,
            codebook_size: 100,
            bloom_k: 7,
            bloom_inserted: 800,
            bloom_queries: 10_000,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::format("config", e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::format("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::at_path(path))?;
        Self::from_toml(&text)
    }
}
