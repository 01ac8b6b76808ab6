//! Decision-tree genotype: evaluation, grow-method generation, subtree
//! crossover and mutation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::problem::{Class, Dataset};

/// Probability that a grow-method position below depth 1 becomes a leaf.
pub const LEAF_PROBABILITY: f64 = 0.3;

/// Re-draws allowed before subtree crossover gives up and copies the parents.
pub const CROSSOVER_ATTEMPTS: usize = 10;

/// A node of a binary decision tree. A split sends samples whose tested
/// variable is 0 to `left` and 1 to `right`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(Class),
    Split { var: u8, left: Box<Node>, right: Box<Node> },
}

impl Node {
    pub fn split(var: u8, left: Node, right: Node) -> Node {
        Node::Split {
            var,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Edges on the longest path from this node to a leaf.
    pub fn height(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split { left, right, .. } => 1 + left.height().max(right.height()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Split { left, right, .. } => 1 + left.size() + right.size(),
        }
    }

    pub fn predict(&self, sample: &[bool]) -> Class {
        let mut node = self;
        loop {
            match node {
                Node::Leaf(c) => return *c,
                Node::Split { var, left, right } => {
                    node = if sample[*var as usize] { right } else { left };
                }
            }
        }
    }

    /// Samples within `mask` (bits of column word `word`) classified as 1.
    fn positives_within(&self, mask: u64, word: usize, data: &Dataset) -> u64 {
        if mask == 0 {
            return 0;
        }
        match self {
            Node::Leaf(1) => mask,
            Node::Leaf(_) => 0,
            Node::Split { var, left, right } => {
                let col = data.column(*var as usize).words()[word];
                left.positives_within(mask & !col, word, data) | right.positives_within(mask & col, word, data)
            }
        }
    }

    fn collect<'a>(&'a self, depth: usize, out: &mut Vec<(&'a Node, usize)>) {
        out.push((self, depth));
        if let Node::Split { left, right, .. } = self {
            left.collect(depth + 1, out);
            right.collect(depth + 1, out);
        }
    }

    /// Applies `f` to the node at preorder index `target`.
    fn edit_at(&mut self, target: usize, counter: &mut usize, f: &mut dyn FnMut(&mut Node)) -> bool {
        if *counter == target {
            f(self);
            return true;
        }
        *counter += 1;
        match self {
            Node::Leaf(_) => false,
            Node::Split { left, right, .. } => left.edit_at(target, counter, f) || right.edit_at(target, counter, f),
        }
    }

    fn write_sexpr(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Leaf(c) => write!(f, "{c}"),
            Node::Split { var, left, right } => {
                write!(f, "(x{var} ")?;
                left.write_sexpr(f)?;
                write!(f, " ")?;
                right.write_sexpr(f)?;
                write!(f, ")")
            }
        }
    }
}

/// A decision tree with its depth cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecisionTree {
    root: Node,
    depth: usize,
}

impl DecisionTree {
    pub fn new(root: Node) -> Self {
        let depth = root.height();
        DecisionTree { root, depth }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// Variable tested at the root, `None` for a leaf-rooted tree.
    pub fn root_var(&self) -> Option<u8> {
        match &self.root {
            Node::Split { var, .. } => Some(*var),
            Node::Leaf(_) => None,
        }
    }

    pub fn predict(&self, sample: &[bool]) -> Class {
        self.root.predict(sample)
    }

    /// Depth within `max_depth`, variables below `vars`, internal root.
    pub fn is_valid(&self, vars: usize, max_depth: usize) -> bool {
        fn vars_ok(n: &Node, vars: usize) -> bool {
            match n {
                Node::Leaf(c) => *c <= 1,
                Node::Split { var, left, right } => {
                    (*var as usize) < vars && vars_ok(left, vars) && vars_ok(right, vars)
                }
            }
        }
        self.depth <= max_depth && self.root_var().is_some() && vars_ok(&self.root, vars)
    }

    /// Nodes in preorder with their depth.
    pub fn preorder(&self) -> Vec<(&Node, usize)> {
        let mut out = Vec::new();
        self.root.collect(0, &mut out);
        out
    }

    fn edited(&self, index: usize, mut f: impl FnMut(&mut Node)) -> DecisionTree {
        let mut root = self.root.clone();
        let found = root.edit_at(index, &mut 0, &mut f);
        debug_assert!(found, "preorder index {index} out of range");
        DecisionTree::new(root)
    }
}

impl fmt::Display for DecisionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write_sexpr(f)
    }
}

impl FromStr for DecisionTree {
    type Err = Error;

    /// Parses the s-expression form, e.g. `(x3 (x0 0 1) 1)`.
    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<String> = s
            .replace('(', " ( ")
            .replace(')', " ) ")
            .split_whitespace()
            .map(str::to_owned)
            .collect();
        let mut pos = 0;
        let root = parse_node(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::config(format!("trailing tokens in tree `{s}`")));
        }
        Ok(DecisionTree::new(root))
    }
}

fn parse_node(tokens: &[String], pos: &mut usize) -> Result<Node> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| Error::config("unexpected end of tree"))?;
    *pos += 1;
    match tok.as_str() {
        "0" => Ok(Node::Leaf(0)),
        "1" => Ok(Node::Leaf(1)),
        "(" => {
            let name = tokens
                .get(*pos)
                .ok_or_else(|| Error::config("unexpected end of tree"))?;
            let var = name
                .strip_prefix('x')
                .and_then(|n| n.parse::<u8>().ok())
                .ok_or_else(|| Error::config(format!("expected variable, found `{name}`")))?;
            *pos += 1;
            let left = parse_node(tokens, pos)?;
            let right = parse_node(tokens, pos)?;
            match tokens.get(*pos).map(String::as_str) {
                Some(")") => {
                    *pos += 1;
                    Ok(Node::split(var, left, right))
                }
                _ => Err(Error::config("expected `)`")),
            }
        }
        other => Err(Error::config(format!("unexpected token `{other}`"))),
    }
}

/// A tree together with its per-sample correctness and accuracy.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub tree: DecisionTree,
    /// Bit k is set iff the tree classifies sample k correctly.
    pub correctness: Bitset,
    /// `correctness.count_ones() / TS`.
    pub fitness: f64,
}

impl Individual {
    pub fn correct_count(&self) -> usize {
        self.correctness.count_ones()
    }
}

pub fn evaluate(tree: DecisionTree, data: &Dataset) -> Individual {
    let all = Bitset::full(data.len());
    let predicted: Vec<u64> = all
        .words()
        .iter()
        .enumerate()
        .map(|(w, &mask)| tree.root.positives_within(mask, w, data))
        .collect();
    let correctness = Bitset::from_words(predicted, data.len()).xnor(data.positives());
    let fitness = correctness.count_ones() as f64 / data.len() as f64;
    Individual {
        tree,
        correctness,
        fitness,
    }
}

/// Grow-method random tree. Depths 0 and 1 are always splits, `max_depth` is
/// always a leaf, anything in between is a leaf with probability
/// [`LEAF_PROBABILITY`].
pub fn random_tree<R: Rng + ?Sized>(vars: usize, max_depth: usize, rng: &mut R) -> Result<DecisionTree> {
    if max_depth < 2 {
        return Err(Error::config(format!("max depth must be >= 2, got {max_depth}")));
    }
    if vars == 0 || vars > u8::MAX as usize + 1 {
        return Err(Error::config(format!("variable count {vars} out of range")));
    }
    Ok(DecisionTree::new(grow(0, vars, max_depth, rng)))
}

fn grow<R: Rng + ?Sized>(depth: usize, vars: usize, max_depth: usize, rng: &mut R) -> Node {
    let leaf = depth >= max_depth || (depth >= 2 && rng.random_bool(LEAF_PROBABILITY));
    if leaf {
        Node::Leaf(rng.random_range(0..=1))
    } else {
        let var = rng.random_range(0..vars) as u8;
        let left = grow(depth + 1, vars, max_depth, rng);
        let right = grow(depth + 1, vars, max_depth, rng);
        Node::split(var, left, right)
    }
}

/// Swaps uniformly chosen non-root subtrees of `a` and `b`.
///
/// Swap points that would push either child past `max_depth` are re-drawn;
/// after [`CROSSOVER_ATTEMPTS`] failures the parents are returned unchanged.
pub fn subtree_crossover<R: Rng + ?Sized>(
    a: &DecisionTree,
    b: &DecisionTree,
    max_depth: usize,
    rng: &mut R,
) -> (DecisionTree, DecisionTree) {
    let nodes_a = a.preorder();
    let nodes_b = b.preorder();
    // The root is only eligible for single-node trees.
    let lo_a = usize::from(nodes_a.len() > 1);
    let lo_b = usize::from(nodes_b.len() > 1);

    for _ in 0..CROSSOVER_ATTEMPTS {
        let ia = rng.random_range(lo_a..nodes_a.len());
        let ib = rng.random_range(lo_b..nodes_b.len());
        let (sub_a, depth_a) = nodes_a[ia];
        let (sub_b, depth_b) = nodes_b[ib];
        if depth_a + sub_b.height() > max_depth || depth_b + sub_a.height() > max_depth {
            continue;
        }
        let child_a = a.edited(ia, |n| *n = sub_b.clone());
        let child_b = b.edited(ib, |n| *n = sub_a.clone());
        return (child_a, child_b);
    }
    (a.clone(), b.clone())
}

/// One of three equally likely edits: re-point a split to a random variable,
/// flip a leaf, or replace a random node with a freshly grown subtree that
/// fits the depth budget at its position.
pub fn mutate<R: Rng + ?Sized>(tree: &DecisionTree, vars: usize, max_depth: usize, rng: &mut R) -> DecisionTree {
    let nodes = tree.preorder();
    match rng.random_range(0..3) {
        0 => {
            let splits: Vec<usize> = (0..nodes.len())
                .filter(|&i| matches!(nodes[i].0, Node::Split { .. }))
                .collect();
            if splits.is_empty() {
                return tree.clone();
            }
            let target = splits[rng.random_range(0..splits.len())];
            let new_var = rng.random_range(0..vars) as u8;
            tree.edited(target, |n| {
                if let Node::Split { var, .. } = n {
                    *var = new_var;
                }
            })
        }
        1 => {
            let leaves: Vec<usize> = (0..nodes.len())
                .filter(|&i| matches!(nodes[i].0, Node::Leaf(_)))
                .collect();
            let target = leaves[rng.random_range(0..leaves.len())];
            tree.edited(target, |n| {
                if let Node::Leaf(c) = n {
                    *c ^= 1;
                }
            })
        }
        _ => {
            let target = rng.random_range(0..nodes.len());
            let depth = nodes[target].1;
            let fresh = grow(depth, vars, max_depth.max(depth), rng);
            tree.edited(target, |n| *n = fresh.clone())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `(correct, routed)` for the samples the root sends to `side`.
///
/// Since every routed sample reaches a leaf through that side's subtree, the
/// subtree is correct on it exactly when the whole tree is.
pub fn side_counts(individual: &Individual, side: Side, data: &Dataset) -> (usize, usize) {
    let var = individual
        .tree
        .root_var()
        .expect("side accuracy requires an internal root");
    let col = data.column(var as usize);
    match side {
        Side::Left => (individual.correctness.and_not_count(col), data.len() - col.count_ones()),
        Side::Right => (individual.correctness.and_count(col), col.count_ones()),
    }
}

/// Accuracy of one root subtree over the samples routed to it; 0 when no
/// sample takes that side.
pub fn side_accuracy(individual: &Individual, side: Side, data: &Dataset) -> f64 {
    let (correct, routed) = side_counts(individual, side, data);
    if routed == 0 {
        0.0
    } else {
        correct as f64 / routed as f64
    }
}
