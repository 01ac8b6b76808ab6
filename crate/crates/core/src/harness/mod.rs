//! Monte-Carlo experiment harness: repeated paired runs per strategy,
//! aggregation, verdicts against `standard`, and file output.

pub mod compare;
pub mod config;
pub mod csvio;
pub mod table1;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};

use crate::engine::{run, EaConfig, RunTrace};
use crate::error::{Error, Result};
use crate::matching::Strategy;
use crate::problem::{generate_problem, Dataset};
use crate::stats::{aggregate, compare, AggregateCurve, Verdict, DEFAULT_EPSILON};

use self::config::ConfigFile;
use self::csvio::{format_curves, format_finals, format_verdicts, VerdictRow};

pub const BASELINE: Strategy = Strategy::Standard;

const DATASET_STREAM: u64 = 0x6461_7461;
const EA_STREAM: u64 = 0x6561;

/// Mixes `(master, run, stream)` into an independent 64-bit seed (SplitMix64 finalizer).
pub fn derive_seed(master: u64, run: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(run.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    /// Shared EA parameters; `strategy` and `seed` are set per run.
    pub base: EaConfig,
    pub strategies: Vec<Strategy>,
    pub repeats: usize,
    pub master_seed: u64,
    /// Reuse the run-0 problem for every repeat instead of drawing a fresh one.
    pub fixed_problem: bool,
}

impl ExperimentSpec {
    pub fn new(base: EaConfig, strategies: Vec<Strategy>, repeats: usize, master_seed: u64) -> Self {
        ExperimentSpec {
            base,
            strategies,
            repeats,
            master_seed,
            fixed_problem: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.repeats < 2 {
            return Err(Error::config(format!("repeats must be >= 2, got {}", self.repeats)));
        }
        if self.strategies.is_empty() {
            return Err(Error::config("no strategies given"));
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if self.strategies[..i].contains(s) {
                return Err(Error::config(format!("strategy `{s}` listed twice")));
            }
        }
        Ok(())
    }

    /// Short identifier such as `v8-n200-ts200-cr0.5`.
    pub fn label(&self) -> String {
        format!(
            "v{}-n{}-ts{}-cr{}",
            self.base.v, self.base.n, self.base.ts, self.base.cr
        )
    }

    pub fn dataset_seed(&self, run: usize) -> u64 {
        let r = if self.fixed_problem { 0 } else { run as u64 };
        derive_seed(self.master_seed, r, DATASET_STREAM)
    }

    pub fn ea_seed(&self, run: usize) -> u64 {
        derive_seed(self.master_seed, run as u64, EA_STREAM)
    }

    pub fn dataset(&self, run: usize) -> Result<Dataset> {
        generate_problem(self.base.v, self.base.ts, self.dataset_seed(run)).map(|(d, _)| d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrategyOutcome {
    pub strategy: Strategy,
    pub curve: AggregateCurve,
    /// Final best-so-far per run, by run index.
    pub finals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub outcomes: Vec<StrategyOutcome>,
    /// Each non-baseline strategy against `standard`, when the baseline ran.
    pub verdicts: Vec<(Strategy, Verdict)>,
    /// Hash of the dataset every strategy saw in each run.
    pub dataset_hashes: Vec<u64>,
}

impl ExperimentResult {
    pub fn outcome(&self, strategy: Strategy) -> Option<&StrategyOutcome> {
        self.outcomes.iter().find(|o| o.strategy == strategy)
    }

    pub fn verdict(&self, strategy: Strategy) -> Option<&Verdict> {
        self.verdicts.iter().find(|(s, _)| *s == strategy).map(|(_, v)| v)
    }

    pub fn verdict_rows(&self) -> Vec<VerdictRow> {
        let label = self.spec.label();
        self.verdicts
            .iter()
            .map(|(s, v)| VerdictRow::new(&label, s.name(), BASELINE.name(), v))
            .collect()
    }

    pub fn curves_csv(&self) -> String {
        format_curves(self.outcomes.iter().map(|o| (o.strategy.name(), &o.curve)))
    }

    pub fn verdicts_csv(&self) -> String {
        format_verdicts(&self.verdict_rows())
    }

    pub fn finals_csv(&self) -> String {
        format_finals(self.outcomes.iter().map(|o| (o.strategy.name(), o.finals.as_slice())))
    }
}

struct RunOutput {
    dataset_hash: u64,
    traces: Vec<RunTrace>,
}

fn run_one(spec: &ExperimentSpec, run_index: usize) -> Result<RunOutput> {
    let data = spec.dataset(run_index)?;
    let mut hasher = DefaultHasher::new();
    data.hash(&mut hasher);
    let mut traces = Vec::with_capacity(spec.strategies.len());
    for &strategy in &spec.strategies {
        let config = EaConfig {
            strategy,
            seed: spec.ea_seed(run_index),
            ..spec.base.clone()
        };
        traces.push(run(&config, &data)?);
    }
    Ok(RunOutput {
        dataset_hash: hasher.finish(),
        traces,
    })
}

#[cfg(feature = "parallel")]
fn run_all(spec: &ExperimentSpec, workers: usize) -> Result<Vec<RunOutput>> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..spec.repeats).into_par_iter().map(|r| run_one(spec, r)).collect())
}

#[cfg(not(feature = "parallel"))]
fn run_all(spec: &ExperimentSpec, _workers: usize) -> Result<Vec<RunOutput>> {
    (0..spec.repeats).map(|r| run_one(spec, r)).collect()
}

/// Runs every strategy on the same `(dataset, EA seed)` sequence and reduces
/// by run index, so the result does not depend on `workers`.
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentResult> {
    spec.validate()?;
    let runs = run_all(spec, workers)?;

    let mut outcomes = Vec::with_capacity(spec.strategies.len());
    for (s, &strategy) in spec.strategies.iter().enumerate() {
        let traces: Vec<RunTrace> = runs.iter().map(|r| r.traces[s].clone()).collect();
        outcomes.push(StrategyOutcome {
            strategy,
            curve: aggregate(&traces)?,
            finals: traces.iter().map(RunTrace::final_value).collect(),
        });
    }

    let mut verdicts = Vec::new();
    if let Some(base) = outcomes.iter().find(|o| o.strategy == BASELINE) {
        for o in outcomes.iter().filter(|o| o.strategy != BASELINE) {
            verdicts.push((o.strategy, compare(&o.finals, &base.finals, DEFAULT_EPSILON)?));
        }
    }

    Ok(ExperimentResult {
        spec: spec.clone(),
        outcomes,
        verdicts,
        dataset_hashes: runs.iter().map(|r| r.dataset_hash).collect(),
    })
}

/// Writes `name` under `dir` via a temporary file and rename.
pub(crate) fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `curves.csv`, `verdicts.csv`, `finals.csv` and `experiment.toml`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<()> {
    let files = [
        ("curves.csv", result.curves_csv()),
        ("verdicts.csv", result.verdicts_csv()),
        ("finals.csv", result.finals_csv()),
        ("experiment.toml", ConfigFile::from_spec(&result.spec).to_toml()),
    ];
    ensure_dir(dir)?;
    for (name, text) in &files {
        write_atomic(dir, name, text)?;
    }
    Ok(())
}

/// Writes each run's dataset as `datasets/run-<r>.csv`.
pub fn dump_datasets(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let sub = dir.join("datasets");
    ensure_dir(&sub)?;
    for r in 0..spec.repeats {
        let mut buf = Vec::new();
        spec.dataset(r)?.write_csv(&mut buf).map_err(|e| Error::io(&sub, e))?;
        write_atomic(&sub, &format!("run-{r}.csv"), &String::from_utf8_lossy(&buf))?;
    }
    Ok(())
}
