//! Scenario files. Every file is TOML with optional top-level `kind`,
//! `seed` and `out` keys; the remaining keys belong to the subcommand.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A parsed scenario: shared keys plus the kind-specific block.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Directory of the config file; relative input paths resolve here.
    pub base_dir: PathBuf,
    pub params: T,
}

pub fn load<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Scenario<T>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse(&text, kind, base_dir)
}

pub fn parse<T: DeserializeOwned>(text: &str, kind: &str, base_dir: PathBuf) -> Result<Scenario<T>, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::Config("config file is empty".into()));
    }
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("parse error: {e}")))?;
    if let Some(k) = table.remove("kind") {
        match k.as_str() {
            Some(s) if s == kind => {}
            _ => {
                return Err(CliError::Config(format!(
                    "scenario kind {k} does not match subcommand `{kind}`"
                )))
            }
        }
    }
    let seed = match table.remove("seed") {
        None => None,
        Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
        Some(v) => return Err(CliError::Config(format!("seed must be a nonnegative integer, got {v}"))),
    };
    let out = match table.remove("out") {
        None => None,
        Some(toml::Value::String(s)) => Some(PathBuf::from(s)),
        Some(v) => return Err(CliError::Config(format!("out must be a string, got {v}"))),
    };
    let params = T::deserialize(toml::Value::Table(table))
        .map_err(|e| CliError::Config(format!("invalid `{kind}` scenario: {e}")))?;
    Ok(Scenario {
        seed,
        out,
        base_dir,
        params,
    })
}

/// Side messages: prior over messages and the winner/action law per message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideConfig {
    pub prior: Vec<f64>,
    pub conditionals: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KellyConfig {
    pub payoffs: Vec<f64>,
    /// Winner probabilities; exactly one of `probs` and `side`.
    pub probs: Option<Vec<f64>>,
    pub side: Option<SideConfig>,
    pub races: usize,
    #[serde(default = "one")]
    pub paths: usize,
    /// Fixed bet fractions; proportional betting when absent.
    pub bets: Option<Vec<f64>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GarchParamsConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma0: f64,
    #[serde(default)]
    pub r0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GarchConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma0: f64,
    #[serde(default)]
    pub r0: f64,
    pub steps: usize,
}

impl GarchConfig {
    pub fn params(&self) -> GarchParamsConfig {
        GarchParamsConfig {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            sigma0: self.sigma0,
            r0: self.r0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfficiencyConfig {
    /// Return CSV, relative to the config file.
    pub input: PathBuf,
    /// Model parameters; fitted from the data when absent.
    pub params: Option<GarchParamsConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingConfig {
    Independent { alpha: Vec<f64>, mu: Vec<f64> },
    Identity { probs: Vec<f64> },
    BinarySymmetric { flip: f64 },
    /// i.i.d. pairs; rows are actions, columns messages.
    Iid { joint: Vec<Vec<f64>> },
    /// Hidden chain with one joint emission table per state.
    Hidden {
        transition: Vec<Vec<f64>>,
        emission: Vec<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    pub coupling: CouplingConfig,
    pub horizon: usize,
    /// Length of the single sampled path for the ergodic estimate.
    pub sample_steps: Option<usize>,
    /// Message block length for the fixed-message increments.
    pub message_len: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrongCodeConfig {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub side: Option<SideConfig>,
    /// Sample this many symbols from `p` and code them with `q`.
    pub sequence_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    pub probs: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub joint: Option<Vec<Vec<f64>>>,
    pub sigma: Option<f64>,
}
