//! JSON experiment configuration.

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use roughpath_core::PointPath;

fn default_p() -> f64 {
    2.5
}

/// Explicit piecewise-linear path, used by the `ratefn` experiment.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl PathSpec {
    pub fn to_point_path(&self) -> Result<PointPath> {
        Ok(PointPath::new(self.times.clone(), self.points.clone())?)
    }
}

/// One experiment run: which study, at which resolution, how many replicates.
///
/// `levels` are dyadic approximation levels, all strictly below the reference
/// level `ref_level`; each replicate reuses one Brownian sample across all
/// levels so comparisons are coupled.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub dim: usize,
    #[serde(default)]
    pub state_dim: usize,
    #[serde(default)]
    pub ref_level: u32,
    #[serde(default)]
    pub levels: Vec<u32>,
    #[serde(default)]
    pub replicates: u32,
    #[serde(default)]
    pub scenario: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<String>,
    /// Input path for `ratefn`; ignored by the other experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathSpec>,
}

/// The experiment tokens, doubling as CLI subcommand names.
pub const EXPERIMENTS: [&str; 6] = ["wz", "goodseq", "levyrate", "support", "ratefn", "antidemo"];

impl ExperimentConfig {
    /// A blank config for the given experiment with the per-experiment
    /// defaults filled in.
    pub fn defaults(experiment: &str) -> Self {
        let mut cfg = ExperimentConfig {
            experiment: experiment.to_string(),
            p: default_p(),
            dim: 0,
            state_dim: 0,
            ref_level: 0,
            levels: Vec::new(),
            replicates: 0,
            scenario: String::new(),
            seed: 42,
            out: None,
            path: None,
        };
        cfg.fill_defaults();
        cfg
    }

    /// Fills unset (zero/empty) fields with the per-experiment defaults.
    pub fn fill_defaults(&mut self) {
        let (dim, state_dim, ref_level, levels, replicates, scenario): (
            usize,
            usize,
            u32,
            Vec<u32>,
            u32,
            &str,
        ) = match self.experiment.as_str() {
            "wz" => (2, 2, 14, (5..=10).collect(), 100, "classical_circle"),
            "goodseq" => (2, 2, 11, (4..=10).collect(), 200, "brownian"),
            "levyrate" => (2, 2, 14, (4..=10).collect(), 2000, "brownian"),
            "support" => (2, 2, 13, vec![12], 50, "classical_circle"),
            "antidemo" => (1, 1, 14, (5..=10).collect(), 100, "anticipating_linear"),
            _ => (2, 1, 14, vec![], 1, "-"),
        };
        if self.dim == 0 {
            self.dim = dim;
        }
        if self.state_dim == 0 {
            self.state_dim = state_dim;
        }
        if self.ref_level == 0 {
            self.ref_level = ref_level;
        }
        if self.levels.is_empty() {
            self.levels = levels;
        }
        if self.replicates == 0 {
            self.replicates = replicates;
        }
        if self.scenario.is_empty() {
            self.scenario = scenario.to_string();
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(CliError::Config(format!(
                "unknown experiment `{}` (expected one of {:?})",
                self.experiment, EXPERIMENTS
            )));
        }
        if self.experiment == "ratefn" {
            if self.path.is_none() {
                return Err(CliError::Config("ratefn needs a `path` object".into()));
            }
            return Ok(());
        }
        if !(2.0 < self.p && self.p < 3.0) {
            return Err(CliError::Config(format!("p must lie in (2, 3), got {}", self.p)));
        }
        if self.replicates < 1 {
            return Err(CliError::Config("replicates must be at least 1".into()));
        }
        if self.levels.is_empty() {
            return Err(CliError::Config("levels must not be empty".into()));
        }
        if self.levels.iter().any(|l| *l >= self.ref_level) {
            return Err(CliError::Config(format!(
                "all levels must be below the reference level {}",
                self.ref_level
            )));
        }
        if self.dim == 0 || self.state_dim == 0 {
            return Err(CliError::Config("dim and state_dim must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let mut cfg: ExperimentConfig =
            serde_json::from_str(json).map_err(|e| CliError::Config(format!("bad config: {e}")))?;
        cfg.fill_defaults();
        Ok(cfg)
    }
}
