//! Evolutionary induction of boolean decision trees with complementary-fitness
//! mate selection.
//!
//! The crossover phase of the EA chooses which individuals recombine. Besides
//! the rank-based baseline ([`Strategy::Standard`]), this crate scores every
//! pair of individuals by how well they could complement each other and walks
//! the pairs best-first:
//!
//! - **Novel-2** sums the best left-subtree and best right-subtree accuracies
//!   of the two roots ([`co_fitness_novel2`]).
//! - **Novel-N** counts samples that at least one of the two trees classifies
//!   correctly ([`co_fitness_noveln`]).
//! - **Hybrid-2 / Hybrid-N** take half of the parents from the baseline and
//!   the rest from the corresponding novel walk.
//!
//! [`harness`] repeats paired runs per strategy and reports mean best-so-far
//! curves with confidence intervals and Welch-test verdicts.
//!
//! ```
//! use cofit::{generate_problem, run, EaConfig, Strategy};
//!
//! let (data, _) = generate_problem(6, 100, 1).unwrap();
//! let mut config = EaConfig::new(6, 30, 100, 0.5);
//! config.iterations = 10;
//! config.strategy = Strategy::Hybrid2;
//! let trace = run(&config, &data).unwrap();
//! assert_eq!(trace.best_so_far.len(), 10);
//! ```

pub mod bitset;
pub mod engine;
pub mod error;
pub mod gptree;
pub mod harness;
pub mod matching;
pub mod problem;
pub mod stats;

pub use engine::{best_individual, run, EaConfig, RunTrace};
pub use error::{Error, Result};
pub use gptree::{
    evaluate, mutate, random_tree, side_accuracy, subtree_crossover, DecisionTree, Individual, Node, Side,
};
pub use harness::{run_experiment, ExperimentResult, ExperimentSpec};
pub use matching::{
    co_fitness_novel2, co_fitness_noveln, crossover_quota, plan, plan_hybrid, plan_novel, plan_standard, MatchingPlan,
    PairScore, Scorer, StandardMode, Strategy,
};
pub use problem::{generate_problem, Dataset, TargetConcept};
pub use stats::{aggregate, compare, AggregateCurve, Verdict, VerdictLabel};
