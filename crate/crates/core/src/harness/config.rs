//! Experiment configuration files.
//!
//! A config is TOML: an `[experiment]` section with campaign settings, an
//! optional `[bounds]` section, and one `[algorithms.<name>]` section per
//! optimizer holding parameter overrides. See `experiments/full.cfg`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fitness::DEFAULT_REPLICATIONS;
use crate::optim::{Algorithm, OptimizerParams, DEFAULT_MAX_EVALUATIONS};
use crate::sim::Scenario;
use crate::space::Bounds;

pub const DEFAULT_RUNS: usize = 30;
pub const DEFAULT_SEED: u64 = 2011;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Preset name or scenario file path.
    pub scenario: String,
    pub bounds: Bounds,
    /// Ordered as PSO, DE, GA, ES, SA.
    pub algorithms: Vec<OptimizerParams>,
    pub runs: usize,
    pub max_evaluations: usize,
    pub replications: usize,
    pub master_seed: u64,
    /// Parallel runs; 0 uses every core.
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: "urban".into(),
            bounds: Bounds::default(),
            algorithms: Algorithm::ALL
                .iter()
                .map(|&a| OptimizerParams::defaults(a))
                .collect(),
            runs: DEFAULT_RUNS,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            replications: DEFAULT_REPLICATIONS,
            master_seed: DEFAULT_SEED,
            workers: 0,
            out: PathBuf::from("results"),
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    scenario: Option<String>,
    runs: Option<usize>,
    max_evaluations: Option<usize>,
    replications: Option<usize>,
    master_seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    experiment: ExperimentSection,
    bounds: Option<Bounds>,
    algorithms: Option<toml::Table>,
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let defaults = Self::default();
        let e = raw.experiment;
        let mut cfg = Self {
            scenario: e.scenario.unwrap_or(defaults.scenario),
            bounds: raw.bounds.unwrap_or_default(),
            algorithms: defaults.algorithms,
            runs: e.runs.unwrap_or(defaults.runs),
            max_evaluations: e.max_evaluations.unwrap_or(defaults.max_evaluations),
            replications: e.replications.unwrap_or(defaults.replications),
            master_seed: e.master_seed.unwrap_or(defaults.master_seed),
            workers: e.workers.unwrap_or(defaults.workers),
            out: e.out.unwrap_or(defaults.out),
        };
        if let Some(table) = raw.algorithms {
            let mut algorithms = Vec::new();
            for (name, section) in &table {
                let algorithm: Algorithm = name.parse()?;
                let mut params = OptimizerParams::defaults(algorithm);
                let section = section
                    .as_table()
                    .ok_or_else(|| Error::Parse(format!("[algorithms.{name}] must be a table")))?;
                for (key, value) in section {
                    params.set(key, &value_text(value))?;
                }
                params.algorithm = algorithm;
                algorithms.push(params);
            }
            algorithms.sort_by_key(|p| p.algorithm);
            cfg.algorithms = algorithms;
        }
        Ok(cfg)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::resolve(&self.scenario)
    }

    pub fn params_for(&self, algorithm: Algorithm) -> OptimizerParams {
        self.algorithms
            .iter()
            .find(|p| p.algorithm == algorithm)
            .cloned()
            .unwrap_or_else(|| OptimizerParams::defaults(algorithm))
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        self.scenario()?;
        for p in &self.algorithms {
            p.validate(self.max_evaluations)?;
        }
        Ok(())
    }
}
