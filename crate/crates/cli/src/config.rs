use std::path::PathBuf;

use lowrank_scatter::contrast::ContrastSpec;
use lowrank_scatter::reconstruction::{CutoffMode, Overrides};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Eig,
    Synth,
    Reconstruct,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    K,
    Delta,
    #[value(name = "N")]
    #[serde(rename = "N")]
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Noise realizations averaged per value, seeded `seed, seed + 1, …`.
    pub seeds: u64,
}

/// Everything a command needs; stored verbatim in each run summary so
/// `lrscatter rerun` reproduces the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub contrast: Option<ContrastSpec>,
    /// Bandwidth for `eig`; other commands use `c = 2k`.
    pub c: Option<f64>,
    pub k: Option<f64>,
    pub n1: usize,
    pub n2: usize,
    pub delta: f64,
    pub seed: u64,
    pub mode: Option<CutoffMode>,
    pub overrides: Overrides,
    pub grid: usize,
    pub decay_step: usize,
    pub out: PathBuf,
    pub input_farfield: Option<PathBuf>,
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    pub fn resolved_mode(&self) -> CutoffMode {
        self.mode.unwrap_or(if self.delta > 0.0 { CutoffMode::NoisyBorn } else { CutoffMode::NoiselessBorn })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub resolved: serde_json::Value,
    pub metrics: serde_json::Value,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

impl Summary {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            resolved: serde_json::Value::Null,
            metrics: serde_json::Value::Null,
            warnings: Vec::new(),
            files: Vec::new(),
        }
    }
}
