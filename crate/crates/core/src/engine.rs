//! Generational loop: plan, recombine, mutate, (μ+λ) truncation.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gptree::{evaluate, mutate, random_tree, subtree_crossover, Individual};
use crate::matching::{crossover_quota, plan, Strategy};
use crate::problem::Dataset;

pub const DEFAULT_MUTATION_RATE: f64 = 0.1;
pub const DEFAULT_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct EaConfig {
    /// Variable count, also the tree depth limit.
    pub v: usize,
    /// Population size.
    pub n: usize,
    /// Dataset size.
    pub ts: usize,
    /// Crossover rate.
    pub cr: f64,
    pub iterations: usize,
    /// Probability that an offspring is mutated.
    pub mutation_rate: f64,
    pub strategy: Strategy,
    pub seed: u64,
}

impl EaConfig {
    pub fn new(v: usize, n: usize, ts: usize, cr: f64) -> Self {
        EaConfig {
            v,
            n,
            ts,
            cr,
            iterations: DEFAULT_ITERATIONS,
            mutation_rate: DEFAULT_MUTATION_RATE,
            strategy: Strategy::Standard,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.v < 2 || self.v > 255 {
            return Err(Error::config(format!("v must be in [2, 255], got {}", self.v)));
        }
        if self.ts < 1 {
            return Err(Error::config("ts must be >= 1"));
        }
        if self.iterations < 1 {
            return Err(Error::config("iterations must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config(format!(
                "mutation_rate must be in [0, 1], got {}",
                self.mutation_rate
            )));
        }
        crossover_quota(self.n, self.cr).map(|_| ())
    }
}

/// Best-so-far accuracy after each generation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub best_so_far: Vec<f64>,
}

impl RunTrace {
    pub fn final_value(&self) -> f64 {
        *self.best_so_far.last().expect("trace has at least one iteration")
    }
}

/// Fittest individual, ties to the lowest index. Panics on an empty slice.
pub fn best_individual(population: &[Individual]) -> &Individual {
    let mut best = &population[0];
    for ind in &population[1..] {
        if ind.fitness > best.fitness {
            best = ind;
        }
    }
    best
}

/// Runs the EA; entry `t` of the trace is the best accuracy seen in the
/// initial population and generations `0..=t`.
pub fn run(config: &EaConfig, data: &Dataset) -> Result<RunTrace> {
    run_with(config, data, |_, _| {})
}

/// Like [`run`], calling `observe(generation, population)` after each
/// survivor selection.
pub fn run_with(config: &EaConfig, data: &Dataset, mut observe: impl FnMut(usize, &[Individual])) -> Result<RunTrace> {
    config.validate()?;
    if data.vars() != config.v || data.len() != config.ts {
        return Err(Error::config(format!(
            "dataset is {}x{}, config expects {}x{}",
            data.len(),
            data.vars(),
            config.ts,
            config.v
        )));
    }
    let k = crossover_quota(config.n, config.cr)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut population: Vec<Individual> = (0..config.n)
        .map(|_| random_tree(config.v, config.v, &mut rng).map(|t| evaluate(t, data)))
        .collect::<Result<_>>()?;
    let mut best = best_individual(&population).fitness;
    let mut trace = Vec::with_capacity(config.iterations);

    for generation in 0..config.iterations {
        let plan = plan(config.strategy, &population, data, k, &mut rng);
        debug_assert!(plan.recombined.len() >= k);

        let mut offspring = Vec::with_capacity(plan.pairs.len() * 2);
        for &(i, j) in &plan.pairs {
            let (a, b) = subtree_crossover(&population[i].tree, &population[j].tree, config.v, &mut rng);
            for child in [a, b] {
                let child = if rng.random_bool(config.mutation_rate) {
                    mutate(&child, config.v, config.v, &mut rng)
                } else {
                    child
                };
                offspring.push(evaluate(child, data));
            }
        }

        population = select_survivors(population, offspring, config.n);
        let generation_best = population[0].fitness;
        debug_assert!(generation_best >= best);
        best = best.max(generation_best);
        trace.push(best);
        observe(generation, &population);
    }
    Ok(RunTrace { best_so_far: trace })
}

/// Keeps the `n` fittest of parents and offspring, best first. Ties prefer
/// offspring, then the lower index within their group.
fn select_survivors(parents: Vec<Individual>, offspring: Vec<Individual>, n: usize) -> Vec<Individual> {
    let mut pool: Vec<(bool, usize, Individual)> = offspring
        .into_iter()
        .enumerate()
        .map(|(i, ind)| (true, i, ind))
        .chain(parents.into_iter().enumerate().map(|(i, ind)| (false, i, ind)))
        .collect();
    pool.sort_by(|a, b| {
        b.2.fitness.total_cmp(&a.2.fitness).then_with(|| match (a.0, b.0) {
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => a.1.cmp(&b.1),
        })
    });
    pool.truncate(n);
    pool.into_iter().map(|(_, _, ind)| ind).collect()
}
