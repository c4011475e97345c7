use std::path::{Path, PathBuf};

use hydroqubo::anneal::NoiseScope;
use hydroqubo::roof::Persistency;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::pipeline::Pipeline;

/// Everything a run or sweep needs. Read from TOML with the same field
/// names; anything left out takes the default below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// 1 for a line of cells, 2 for a square grid.
    pub dims: usize,
    /// Cells of the line.
    pub n: usize,
    /// Grid sizes `N`; sweeps other than `sweep-grid` use the first.
    pub grid: Vec<usize>,
    pub delta_k: Vec<f64>,
    pub k_low: f64,
    /// Observation noise on the heads.
    pub sigma: Vec<f64>,
    /// Sample counts fed to MQC.
    pub samples: Vec<usize>,
    pub num_reads: usize,
    pub sweeps: usize,
    pub sigma_hw: f64,
    pub noise_scope: NoiseScope,
    /// Multiple of the largest coefficient touching a chain.
    pub chain_strength: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub pipelines: Vec<Pipeline>,
    pub persistency: Persistency,
    pub po_width: usize,
    /// Run PO on every sample instead of the best one. Pipelines with MQC
    /// always do.
    pub po_each: bool,
    /// Run the first cell of a sweep once before timing anything.
    pub warmup: bool,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: "run".into(),
            dims: 1,
            n: 2030,
            grid: vec![2, 4, 6, 8, 12, 16],
            delta_k: vec![2.0, 4.0, 8.0, 16.0, 32.0, 50.0, 64.0, 100.0, 128.0],
            k_low: 1.0,
            sigma: vec![0.0],
            samples: vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024],
            num_reads: 1000,
            sweeps: 1000,
            sigma_hw: 0.01,
            noise_scope: NoiseScope::PerRead,
            chain_strength: 1.5,
            repetitions: 50,
            seed: 0,
            pipelines: vec![Pipeline::Plain],
            persistency: Persistency::Strong,
            po_width: 4,
            po_each: false,
            warmup: true,
            output: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.dims != 1 && self.dims != 2 {
            return Err(bad(format!("dims must be 1 or 2, got {}", self.dims)));
        }
        if self.n < 2 {
            return Err(bad("n must be at least 2"));
        }
        for (name, empty) in [
            ("grid", self.grid.is_empty()),
            ("delta_k", self.delta_k.is_empty()),
            ("sigma", self.sigma.is_empty()),
            ("samples", self.samples.is_empty()),
            ("pipelines", self.pipelines.is_empty()),
        ] {
            if empty {
                return Err(bad(format!("{name} must not be empty")));
            }
        }
        if self.grid.contains(&0) {
            return Err(bad("grid sizes must be at least 1"));
        }
        if let Some(dk) = self.delta_k.iter().find(|dk| !(**dk > 0.0 && dk.is_finite())) {
            return Err(bad(format!("delta_k must be positive, got {dk}")));
        }
        if !(self.k_low > 0.0 && self.k_low.is_finite()) {
            return Err(bad("k_low must be positive"));
        }
        if let Some(s) = self.sigma.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(bad(format!("sigma must be non-negative, got {s}")));
        }
        if !(self.sigma_hw >= 0.0 && self.sigma_hw.is_finite()) {
            return Err(bad("sigma_hw must be non-negative"));
        }
        if !(self.chain_strength > 0.0 && self.chain_strength.is_finite()) {
            return Err(bad("chain_strength must be positive"));
        }
        if self.samples.contains(&0) || self.num_reads == 0 || self.sweeps == 0 {
            return Err(bad("samples, num_reads and sweeps must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(bad("repetitions must be at least 1"));
        }
        if self.po_width == 0 {
            return Err(bad("po_width must be at least 1"));
        }
        Ok(())
    }

    /// Problem size for the current dimensionality: `n` or the first grid size.
    pub fn size(&self) -> usize {
        if self.dims == 1 {
            self.n
        } else {
            self.grid[0]
        }
    }
}
