//! Experiment configuration file (TOML key-value text).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{EaConfig, DEFAULT_ITERATIONS, DEFAULT_MUTATION_RATE};
use crate::error::{Error, Result};
use crate::harness::ExperimentSpec;
use crate::matching::Strategy;

pub const DEFAULT_REPEATS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub v: usize,
    pub n: usize,
    pub ts: usize,
    pub cr: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_mutation_rate")]
    pub mutation_rate: f64,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<String>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub fixed_problem: bool,
}

fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}

fn default_mutation_rate() -> f64 {
    DEFAULT_MUTATION_RATE
}

fn default_strategies() -> Vec<String> {
    ["standard", "hybrid2", "hybridn"].map(String::from).to_vec()
}

fn default_repeats() -> usize {
    DEFAULT_REPEATS
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_spec(&self) -> Result<ExperimentSpec> {
        let strategies = self
            .strategies
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Strategy>>>()?;
        let mut base = EaConfig::new(self.v, self.n, self.ts, self.cr);
        base.iterations = self.iterations;
        base.mutation_rate = self.mutation_rate;
        let spec = ExperimentSpec {
            base,
            strategies,
            repeats: self.repeats,
            master_seed: self.master_seed,
            fixed_problem: self.fixed_problem,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &ExperimentSpec) -> Self {
        ConfigFile {
            v: spec.base.v,
            n: spec.base.n,
            ts: spec.base.ts,
            cr: spec.base.cr,
            iterations: spec.base.iterations,
            mutation_rate: spec.base.mutation_rate,
            strategies: spec.strategies.iter().map(|s| s.name().to_string()).collect(),
            repeats: spec.repeats,
            master_seed: spec.master_seed,
            fixed_problem: spec.fixed_problem,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
