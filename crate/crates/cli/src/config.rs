//! Experiment configuration, read from JSON.

use serde::{Deserialize, Serialize};
use std::path::Path;

use stochastic_vc::commit::AlgorithmId;
use stochastic_vc::oracle::{CoverOracle, TieBreak};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleChoice {
    Exact,
    Greedy2,
    Bruteforce,
}

impl OracleChoice {
    pub fn build(self, tie_break: TieBreak) -> CoverOracle {
        let oracle = match self {
            OracleChoice::Exact => CoverOracle::exact(),
            OracleChoice::Greedy2 => CoverOracle::greedy2(),
            OracleChoice::Bruteforce => CoverOracle::bruteforce(),
        };
        oracle.with_tie_break(tie_break)
    }
}

impl std::str::FromStr for OracleChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(OracleChoice::Exact),
            "greedy2" => Ok(OracleChoice::Greedy2),
            "bruteforce" => Ok(OracleChoice::Bruteforce),
            other => Err(format!("unknown oracle '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginalMode {
    Exact,
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Full weighted sweep of the scenario space.
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" => Ok(ReportFormat::Jsonl),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

fn default_eps() -> f64 {
    0.05
}

fn default_delta() -> f64 {
    0.1
}

fn default_trials() -> u64 {
    100
}

fn default_seed() -> u64 {
    0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instances: Vec<String>,
    pub algorithms: Vec<String>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub oracle: OracleChoice,
    pub marginal_mode: MarginalMode,
    pub mode: RunMode,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub format: ReportFormat,
    #[serde(default)]
    pub out: Option<String>,
    /// Sample count override for estimated marginals; the prescribed
    /// Hoeffding count is used when absent.
    #[serde(default)]
    pub marginal_samples: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps <= 0.0 || self.eps.is_nan() {
            return Err(CliError::Config(format!("eps = {}, need > 0", self.eps)));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be >= 1".into()));
        }
        if self.instances.is_empty() {
            return Err(CliError::Config("no instances listed".into()));
        }
        for name in &self.algorithms {
            name.parse::<AlgorithmId>()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn algorithm_ids(&self) -> Vec<AlgorithmId> {
        self.algorithms
            .iter()
            .map(|s| s.parse().expect("validated"))
            .collect()
    }
}
