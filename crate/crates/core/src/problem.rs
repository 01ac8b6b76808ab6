//! Synthetic boolean classification problems labelled by a hidden decision tree.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::gptree::{DecisionTree, Node};

/// Binary class id, always 0 or 1.
pub type Class = u8;

/// A fixed table of boolean feature vectors with binary labels.
///
/// Rows are samples, columns are variables. Column bitsets are kept alongside
/// the row-major table so that tree evaluation can route whole sample sets at
/// once.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dataset {
    vars: usize,
    features: Vec<bool>,
    labels: Vec<Class>,
    columns: Vec<Bitset>,
    positives: Bitset,
}

impl Dataset {
    /// Builds a dataset from explicit rows. Every row must have the same length
    /// and every label must be 0 or 1.
    pub fn from_rows(rows: &[Vec<bool>], labels: &[Class]) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::config(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if rows.is_empty() {
            return Err(Error::config("dataset must have at least one sample"));
        }
        let vars = rows[0].len();
        if vars == 0 || rows.iter().any(|r| r.len() != vars) {
            return Err(Error::config("rows must be non-empty and of equal length"));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::config(format!("label {bad} is not 0 or 1")));
        }
        let ts = rows.len();
        let features: Vec<bool> = rows.iter().flatten().copied().collect();
        let columns = (0..vars)
            .map(|j| Bitset::from_fn(ts, |k| features[k * vars + j]))
            .collect();
        let positives = Bitset::from_fn(ts, |k| labels[k] == 1);
        Ok(Dataset {
            vars,
            features,
            labels: labels.to_vec(),
            columns,
            positives,
        })
    }

    /// Number of samples (TS).
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of boolean variables (V).
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn row(&self, k: usize) -> &[bool] {
        &self.features[k * self.vars..(k + 1) * self.vars]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.features.chunks_exact(self.vars)
    }

    /// The stored class of sample `k`.
    ///
    /// Panics when `k` is out of range.
    pub fn label_of(&self, k: usize) -> Class {
        self.labels[k]
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    /// Samples whose variable `var` is 1.
    pub fn column(&self, var: usize) -> &Bitset {
        &self.columns[var]
    }

    /// Samples labelled 1.
    pub fn positives(&self) -> &Bitset {
        &self.positives
    }

    /// Debug dump: header `f0..f{V-1},label`, one 0/1 row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.vars)
            .map(|j| format!("f{j}"))
            .chain(std::iter::once("label".to_string()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (row, label) in self.rows().zip(&self.labels) {
            for &x in row {
                write!(out, "{},", x as u8)?;
            }
            writeln!(out, "{label}")?;
        }
        Ok(())
    }
}

/// The hidden tree that labelled a generated dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetConcept {
    pub tree: DecisionTree,
    pub seed: u64,
}

/// Generates a problem with `ts` uniformly random rows over `v` variables,
/// labelled by a random full tree of depth exactly `v`.
///
/// Every root-to-leaf path of the target tests each variable once, in a random
/// order, and leaves carry uniformly random classes.
pub fn generate_problem(v: usize, ts: usize, seed: u64) -> Result<(Dataset, TargetConcept)> {
    if v < 2 {
        return Err(Error::config(format!("variable count must be >= 2, got {v}")));
    }
    if ts < 1 {
        return Err(Error::config("sample count must be >= 1"));
    }
    if v > u8::MAX as usize {
        return Err(Error::config(format!("variable count {v} exceeds 255")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unused: Vec<u8> = (0..v as u8).collect();
    let tree = DecisionTree::new(full_target(&mut unused, &mut rng));

    let rows: Vec<Vec<bool>> = (0..ts)
        .map(|_| (0..v).map(|_| rng.random_bool(0.5)).collect())
        .collect();
    let labels: Vec<Class> = rows.iter().map(|r| tree.predict(r)).collect();
    let dataset = Dataset::from_rows(&rows, &labels)?;
    Ok((dataset, TargetConcept { tree, seed }))
}

fn full_target(unused: &mut Vec<u8>, rng: &mut ChaCha8Rng) -> Node {
    if unused.is_empty() {
        return Node::Leaf(rng.random_range(0..=1));
    }
    unused.shuffle(rng);
    let var = unused.pop().expect("non-empty");
    let left = full_target(&mut unused.clone(), rng);
    let right = full_target(&mut unused.clone(), rng);
    unused.push(var);
    Node::split(var, left, right)
}
