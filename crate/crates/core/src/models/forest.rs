//! Random forest of Gini-impurity decision trees.
//!
//! Each tree is grown on a bootstrap sample (held as per-sample integer
//! weights) and picks, at every node, a uniformly random subset of the
//! features that are not constant within that node. Split quality is
//! compared with exact integer arithmetic, so tie-breaking is well defined:
//! lowest feature index, then lowest threshold. Thresholds are midpoints
//! between consecutive observed values and `x <= threshold` goes left.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrainingSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `ceil(sqrt(d))` of the full column count.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, dim: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => (libm::ceil(libm::sqrt(dim as f64)) as usize).max(1),
            MaxFeatures::All => dim.max(1),
            MaxFeatures::Count(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, max_features: MaxFeatures::Sqrt, max_depth: None, min_leaf: 1, bootstrap: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Split { feature: u32, threshold: f64, left: u32, right: u32 },
    /// Summed training weight of each class that reached the leaf.
    Leaf { gang: u32, nongang: u32 },
}

/// Nodes in creation order; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    /// Class weights of the leaf a row lands in.
    pub fn leaf(&self, row: &[(u32, f64)]) -> (u32, u32) {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { gang, nongang } => return (gang, nongang),
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if value_of(row, feature) <= threshold { left } else { right } as usize;
                }
            }
        }
    }

    /// A tree votes gang when gang weight strictly outnumbers nongang.
    pub fn votes_gang(&self, row: &[(u32, f64)]) -> bool {
        let (g, n) = self.leaf(row);
        g > n
    }

    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((at, d)) = stack.pop() {
            deepest = deepest.max(d);
            if let TreeNode::Split { left, right, .. } = self.nodes[at] {
                stack.push((left as usize, d + 1));
                stack.push((right as usize, d + 1));
            }
        }
        deepest
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    /// Fraction of trees voting gang.
    pub fn score(&self, row: &[(u32, f64)]) -> f64 {
        if self.trees.is_empty() {
            return 0.0;
        }
        let votes = self.trees.iter().filter(|t| t.votes_gang(row)).count();
        votes as f64 / self.trees.len() as f64
    }
}

fn value_of(row: &[(u32, f64)], feature: u32) -> f64 {
    row.binary_search_by_key(&feature, |&(c, _)| c).map_or(0.0, |i| row[i].1)
}

/// Fit a forest. Unlike [`super::train`], this accepts single-class data and
/// yields trees that are single leaves.
pub fn fit(data: &TrainingSet, params: &ForestParams, seed: u64) -> Forest {
    let n = data.len();
    let max_features = params.max_features.resolve(data.dim());
    let trees = (0..params.n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let weights = if params.bootstrap {
                let mut w = vec![0u32; n];
                for _ in 0..n {
                    w[rng.gen_range(0..n)] += 1;
                }
                w
            } else {
                vec![1u32; n]
            };
            fit_tree(data, &weights, max_features, params.max_depth, params.min_leaf, &mut rng)
        })
        .collect();
    Forest { trees }
}

/// Grow one tree on weighted samples; zero-weight samples are left out.
pub fn fit_tree(
    data: &TrainingSet,
    weights: &[u32],
    max_features: usize,
    max_depth: Option<usize>,
    min_leaf: usize,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let root: Vec<u32> = (0..data.len() as u32).filter(|&i| weights[i as usize] > 0).collect();
    let mut nodes = vec![TreeNode::Leaf { gang: 0, nongang: 0 }];
    // explicit stack: unbounded depth must not recurse
    let mut pending = vec![(0usize, root, 0usize)];
    while let Some((slot, samples, depth)) = pending.pop() {
        let (g, n) = class_weights(data, weights, &samples);
        let leaf = TreeNode::Leaf { gang: g as u32, nongang: n as u32 };
        let can_split = g > 0 && n > 0 && max_depth.is_none_or(|d| depth < d) && samples.len() >= 2 * min_leaf.max(1);
        let split = if can_split { best_split(data, weights, &samples, (g, n), max_features, min_leaf, rng) } else { None };
        let Some((feature, threshold)) = split else {
            nodes[slot] = leaf;
            continue;
        };
        let (left, right): (Vec<u32>, Vec<u32>) =
            samples.iter().partition(|&&s| value_of(&data.rows()[s as usize], feature) <= threshold);
        let l = nodes.len();
        nodes.push(TreeNode::Leaf { gang: 0, nongang: 0 });
        nodes.push(TreeNode::Leaf { gang: 0, nongang: 0 });
        nodes[slot] = TreeNode::Split { feature, threshold, left: l as u32, right: l as u32 + 1 };
        pending.push((l + 1, right, depth + 1));
        pending.push((l, left, depth + 1));
    }
    Tree { nodes }
}

fn class_weights(data: &TrainingSet, weights: &[u32], samples: &[u32]) -> (u64, u64) {
    let mut g = 0u64;
    let mut n = 0u64;
    for &s in samples {
        let w = u64::from(weights[s as usize]);
        if data.labels()[s as usize].is_gang() {
            g += w;
        } else {
            n += w;
        }
    }
    (g, n)
}

/// Split score `Σ_child Σ_class w² / w_child` as a fraction. Higher is
/// better; maximizing it minimizes the weighted Gini impurity.
#[derive(Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(left: (u64, u64), right: (u64, u64)) -> Self {
        let sq = |(a, b): (u64, u64)| u128::from(a) * u128::from(a) + u128::from(b) * u128::from(b);
        let lw = u128::from(left.0 + left.1);
        let rw = u128::from(right.0 + right.1);
        Score { num: sq(left) * rw + sq(right) * lw, den: lw * rw }
    }

    fn beats(self, other: Score) -> bool {
        self.num * other.den > other.num * self.den
    }
}

struct Group {
    value: f64,
    gang: u64,
    nongang: u64,
    count: usize,
}

fn best_split(
    data: &TrainingSet,
    weights: &[u32],
    samples: &[u32],
    totals: (u64, u64),
    max_features: usize,
    min_leaf: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(u32, f64)> {
    let mut entries: Vec<(u32, f64, u32)> = Vec::new();
    for &s in samples {
        entries.extend(data.rows()[s as usize].iter().map(|&(c, v)| (c, v, s)));
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut candidates: Vec<(u32, Range<usize>)> = Vec::new();
    let mut i = 0;
    while i < entries.len() {
        let feature = entries[i].0;
        let mut j = i;
        while j < entries.len() && entries[j].0 == feature {
            j += 1;
        }
        let constant = j - i == samples.len() && entries[i].1 == entries[j - 1].1;
        if !constant {
            candidates.push((feature, i..j));
        }
        i = j;
    }
    if candidates.is_empty() {
        return None;
    }
    let chosen: Vec<usize> = if max_features < candidates.len() {
        let mut picked = index::sample(rng, candidates.len(), max_features).into_vec();
        picked.sort_unstable();
        picked
    } else {
        (0..candidates.len()).collect()
    };

    let mut best: Option<(Score, u32, f64)> = None;
    for c in chosen {
        let (feature, ref range) = candidates[c];
        let groups = value_groups(data, weights, &entries[range.clone()], totals, samples.len());
        let mut left = (0u64, 0u64);
        let mut left_count = 0usize;
        for pair in groups.windows(2) {
            left.0 += pair[0].gang;
            left.1 += pair[0].nongang;
            left_count += pair[0].count;
            if left_count < min_leaf || samples.len() - left_count < min_leaf {
                continue;
            }
            let score = Score::new(left, (totals.0 - left.0, totals.1 - left.1));
            let threshold = (pair[0].value + pair[1].value) / 2.0;
            if best.as_ref().is_none_or(|(b, _, _)| score.beats(*b)) {
                best = Some((score, feature, threshold));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

/// Distinct values of one feature within a node, ascending, with the
/// implicit zeros of samples that lack the feature merged in.
fn value_groups(
    data: &TrainingSet,
    weights: &[u32],
    present: &[(u32, f64, u32)],
    totals: (u64, u64),
    node_size: usize,
) -> Vec<Group> {
    let mut zero = Group { value: 0.0, gang: totals.0, nongang: totals.1, count: node_size };
    let mut below: Vec<Group> = Vec::new();
    let mut above: Vec<Group> = Vec::new();
    for &(_, value, s) in present {
        let w = u64::from(weights[s as usize]);
        let gang = data.labels()[s as usize].is_gang();
        if gang {
            zero.gang -= w;
        } else {
            zero.nongang -= w;
        }
        zero.count -= 1;
        let side = if value < 0.0 { &mut below } else { &mut above };
        match side.last_mut() {
            Some(g) if g.value == value => {
                if gang {
                    g.gang += w;
                } else {
                    g.nongang += w;
                }
                g.count += 1;
            }
            _ => side.push(Group {
                value,
                gang: if gang { w } else { 0 },
                nongang: if gang { 0 } else { w },
                count: 1,
            }),
        }
    }
    if zero.count > 0 {
        below.push(zero);
    }
    below.extend(above);
    below
}
