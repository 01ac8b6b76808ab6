//! Mate selection: complementary-fitness pair scoring and the parent
//! matching strategies.
//!
//! Every strategy produces a [`MatchingPlan`], a list of index pairs that will
//! recombine in the current generation, covering at least `K` distinct
//! individuals where `K` is the [`crossover_quota`].

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gptree::{side_accuracy, Individual, Side};
use crate::problem::Dataset;

/// Parent-selection strategy for the crossover phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Top-K fittest, paired uniformly at random.
    Standard,
    /// K parents by fitness-proportional sampling, paired uniformly at random.
    StandardRoulette,
    Novel2,
    NovelN,
    Hybrid2,
    HybridN,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Standard,
        Strategy::StandardRoulette,
        Strategy::Novel2,
        Strategy::NovelN,
        Strategy::Hybrid2,
        Strategy::HybridN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Standard => "standard",
            Strategy::StandardRoulette => "standard-roulette",
            Strategy::Novel2 => "novel2",
            Strategy::NovelN => "noveln",
            Strategy::Hybrid2 => "hybrid2",
            Strategy::HybridN => "hybridn",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::config(format!("unknown strategy `{s}`")))
    }
}

/// Complementary-fitness measure used by the novel and hybrid strategies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scorer {
    /// Best left-side accuracy plus best right-side accuracy of the two roots.
    Novel2,
    /// Samples classified correctly by at least one of the two trees.
    NovelN,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardMode {
    Uniform,
    Roulette,
}

/// A scored unordered pair, `i < j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairScore {
    pub i: usize,
    pub j: usize,
    pub co_fitness: f64,
}

/// Pairs chosen to recombine and the distinct individuals they cover.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchingPlan {
    pub pairs: Vec<(usize, usize)>,
    pub recombined: BTreeSet<usize>,
}

impl MatchingPlan {
    fn push(&mut self, i: usize, j: usize) {
        self.pairs.push((i, j));
        self.recombined.insert(i);
        self.recombined.insert(j);
    }
}

/// `K = ceil(cr * n)`, clamped to `[2, n]`.
pub fn crossover_quota(n: usize, cr: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::config(format!("population size must be >= 2, got {n}")));
    }
    if !(cr > 0.0 && cr <= 1.0) {
        return Err(Error::config(format!("crossover rate must be in (0, 1], got {cr}")));
    }
    // absorb representation error, e.g. 0.07 * 100 = 7.000000000000001
    let k = (cr * n as f64 - 1e-9).ceil() as usize;
    Ok(k.clamp(2, n))
}

pub fn co_fitness_novel2(a: &Individual, b: &Individual, data: &Dataset) -> f64 {
    let left = side_accuracy(a, Side::Left, data).max(side_accuracy(b, Side::Left, data));
    let right = side_accuracy(a, Side::Right, data).max(side_accuracy(b, Side::Right, data));
    left + right
}

pub fn co_fitness_noveln(a: &Individual, b: &Individual) -> usize {
    a.correctness.union_count(&b.correctness)
}

/// Scores every unordered pair of the population, in `(i, j)` lexicographic order.
pub fn score_pairs(population: &[Individual], scorer: Scorer, data: &Dataset) -> Vec<PairScore> {
    let n = population.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    match scorer {
        Scorer::NovelN => {
            for i in 0..n {
                for j in i + 1..n {
                    let s = co_fitness_noveln(&population[i], &population[j]);
                    out.push(PairScore {
                        i,
                        j,
                        co_fitness: s as f64,
                    });
                }
            }
        }
        Scorer::Novel2 => {
            let sides: Vec<(f64, f64)> = population
                .iter()
                .map(|ind| {
                    (
                        side_accuracy(ind, Side::Left, data),
                        side_accuracy(ind, Side::Right, data),
                    )
                })
                .collect();
            for i in 0..n {
                for j in i + 1..n {
                    let s = sides[i].0.max(sides[j].0) + sides[i].1.max(sides[j].1);
                    out.push(PairScore { i, j, co_fitness: s });
                }
            }
        }
    }
    out
}

struct Ranked {
    score: f64,
    priority: u32,
    i: usize,
    j: usize,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    // higher score first, then lower tie priority
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.priority.cmp(&self.priority))
    }
}

/// Sorted-pair walk shared by the novel and hybrid strategies.
///
/// Ties are broken by a permutation of the pair list drawn once from `rng`
/// (pair at list position `p` gets priority `perm[p]`, lower first). Pairs
/// whose members are both already in `plan` are skipped; the walk stops as
/// soon as the plan covers `k` individuals.
fn extend_by_scores<R: Rng + ?Sized>(plan: &mut MatchingPlan, scores: &[PairScore], k: usize, rng: &mut R) {
    let mut priorities: Vec<u32> = (0..scores.len() as u32).collect();
    priorities.shuffle(rng);
    if plan.recombined.len() >= k {
        return;
    }
    // lazy heap: only the accepted prefix of the ordering is ever materialized
    let mut heap: BinaryHeap<Ranked> = scores
        .iter()
        .zip(priorities)
        .map(|(s, priority)| Ranked {
            score: s.co_fitness,
            priority,
            i: s.i,
            j: s.j,
        })
        .collect();
    while plan.recombined.len() < k {
        let Some(top) = heap.pop() else { break };
        if plan.recombined.contains(&top.i) && plan.recombined.contains(&top.j) {
            continue;
        }
        plan.push(top.i, top.j);
    }
}

/// Walks pre-computed pair scores in descending order until `k` distinct
/// individuals are covered.
pub fn plan_by_scores<R: Rng + ?Sized>(scores: &[PairScore], k: usize, rng: &mut R) -> MatchingPlan {
    let mut plan = MatchingPlan::default();
    extend_by_scores(&mut plan, scores, k, rng);
    plan
}

pub fn plan_novel<R: Rng + ?Sized>(
    population: &[Individual],
    scorer: Scorer,
    data: &Dataset,
    k: usize,
    rng: &mut R,
) -> MatchingPlan {
    let k = k.min(population.len());
    plan_by_scores(&score_pairs(population, scorer, data), k, rng)
}

/// Population indices sorted by fitness, best first, ties to the lower index.
pub fn rank_by_fitness(population: &[Individual]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..population.len()).collect();
    idx.sort_by(|&a, &b| population[b].fitness.total_cmp(&population[a].fitness).then(a.cmp(&b)));
    idx
}

/// Fitness-proportional draw of `k` distinct indices; once only zero-fitness
/// individuals remain, the rest are drawn uniformly.
fn roulette_without_replacement<R: Rng + ?Sized>(population: &[Individual], k: usize, rng: &mut R) -> Vec<usize> {
    let mut chosen = index::sample_weighted(rng, population.len(), |i| population[i].fitness, k)
        .expect("fitness is a finite non-negative accuracy")
        .into_vec();
    if chosen.len() < k {
        let mut rest: Vec<usize> = (0..population.len()).filter(|i| !chosen.contains(i)).collect();
        rest.shuffle(rng);
        chosen.extend(rest.into_iter().take(k - chosen.len()));
    }
    chosen
}

/// Shuffles `chosen` and pairs neighbours. An odd leftover is matched with a
/// uniformly random other member.
fn pair_up<R: Rng + ?Sized>(plan: &mut MatchingPlan, mut chosen: Vec<usize>, rng: &mut R) {
    chosen.shuffle(rng);
    for pair in chosen.chunks(2) {
        match *pair {
            [a, b] => plan.push(a, b),
            [last] => {
                let partner = chosen[rng.random_range(0..chosen.len() - 1)];
                plan.push(last, partner);
            }
            _ => unreachable!(),
        }
    }
}

pub fn plan_standard<R: Rng + ?Sized>(
    population: &[Individual],
    k: usize,
    rng: &mut R,
    mode: StandardMode,
) -> MatchingPlan {
    let k = k.clamp(2, population.len());
    let chosen = match mode {
        StandardMode::Uniform => rank_by_fitness(population).into_iter().take(k).collect(),
        StandardMode::Roulette => roulette_without_replacement(population, k, rng),
    };
    let mut plan = MatchingPlan::default();
    pair_up(&mut plan, chosen, rng);
    plan
}

/// Half the quota (rounded up, at least 2) from the standard top-K rule, the
/// rest from the sorted complementary-fitness walk.
pub fn plan_hybrid<R: Rng + ?Sized>(
    population: &[Individual],
    scorer: Scorer,
    data: &Dataset,
    k: usize,
    rng: &mut R,
) -> MatchingPlan {
    let k = k.clamp(2, population.len());
    let mut plan = plan_standard(population, k.div_ceil(2), rng, StandardMode::Uniform);
    if plan.recombined.len() < k {
        let scores = score_pairs(population, scorer, data);
        extend_by_scores(&mut plan, &scores, k, rng);
    }
    plan
}

/// Builds the plan for one generation.
pub fn plan<R: Rng + ?Sized>(
    strategy: Strategy,
    population: &[Individual],
    data: &Dataset,
    k: usize,
    rng: &mut R,
) -> MatchingPlan {
    match strategy {
        Strategy::Standard => plan_standard(population, k, rng, StandardMode::Uniform),
        Strategy::StandardRoulette => plan_standard(population, k, rng, StandardMode::Roulette),
        Strategy::Novel2 => plan_novel(population, Scorer::Novel2, data, k, rng),
        Strategy::NovelN => plan_novel(population, Scorer::NovelN, data, k, rng),
        Strategy::Hybrid2 => plan_hybrid(population, Scorer::Novel2, data, k, rng),
        Strategy::HybridN => plan_hybrid(population, Scorer::NovelN, data, k, rng),
    }
}
