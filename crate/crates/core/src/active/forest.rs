//! Bagged, depth-limited Gini decision trees.
//!
//! Every tree is grown on its own bootstrap resample, drawn from a ChaCha
//! stream keyed by `(seed, tree index)`, so fitting in parallel is
//! reproducible. Leaves hold Laplace-smoothed class frequencies; the member
//! distributions of a prediction are the leaves reached in each tree.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::data::TabularDataset;
use crate::error::{Result, UqError};
use crate::measures::{CategoricalDistribution, SecondOrderSample};

/// Improvements smaller than this do not displace an earlier split candidate.
const SPLIT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    /// Ensemble size `M`.
    pub n_trees: usize,
    pub depth_cap: usize,
    /// Minimum number of (bootstrap) rows in each child of a split.
    pub min_leaf: usize,
    /// Laplace smoothing added to every leaf class count.
    pub alpha: f64,
    /// Features considered per split; `None` means all of them.
    pub max_features: Option<usize>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            n_trees: 10,
            depth_cap: 6,
            min_leaf: 1,
            alpha: 1.0,
            max_features: None,
        }
    }
}

impl LearnerConfig {
    fn validate(&self, dim: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(UqError::BadConfig(
                "ensemble needs at least one tree".into(),
            ));
        }
        if self.min_leaf == 0 {
            return Err(UqError::BadConfig("min_leaf must be at least 1".into()));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(UqError::BadConfig(format!(
                "invalid smoothing alpha {}",
                self.alpha
            )));
        }
        if let Some(f) = self.max_features {
            if f == 0 || f > dim {
                return Err(UqError::BadConfig(format!(
                    "max_features {f} outside 1..={dim}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(CategoricalDistribution),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// A single tree stored as an arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> &CategoricalDistribution {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(d) => return d,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf(_)))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleLearner {
    trees: Vec<DecisionTree>,
    dim: usize,
    n_classes: usize,
    seed: u64,
}

impl EnsembleLearner {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// One member distribution per tree, in tree order.
    pub fn predict_second_order(&self, x: &[f64]) -> Result<SecondOrderSample> {
        if x.len() != self.dim {
            return Err(UqError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        SecondOrderSample::new(self.trees.iter().map(|t| t.predict(x).clone()).collect())
    }
}

/// Free-function form of [`EnsembleLearner::predict_second_order`].
pub fn predict_second_order(learner: &EnsembleLearner, x: &[f64]) -> Result<SecondOrderSample> {
    learner.predict_second_order(x)
}

/// Fits `config.n_trees` trees, each on a bootstrap resample of `train`.
pub fn fit(config: &LearnerConfig, train: &TabularDataset, seed: u64) -> Result<EnsembleLearner> {
    if train.is_empty() {
        return Err(UqError::EmptyTrain);
    }
    config.validate(train.dim())?;
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let n = train.len();
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            TreeBuilder {
                config,
                data: train,
                rng,
                nodes: Vec::new(),
            }
            .build(rows)
        })
        .collect();
    Ok(EnsembleLearner {
        trees,
        dim: train.dim(),
        n_classes: train.n_classes(),
        seed,
    })
}

struct TreeBuilder<'a> {
    config: &'a LearnerConfig,
    data: &'a TabularDataset,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl TreeBuilder<'_> {
    fn build(mut self, rows: Vec<usize>) -> DecisionTree {
        self.grow(rows, 0);
        DecisionTree { nodes: self.nodes }
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_counts(&rows);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let split =
            if pure || depth >= self.config.depth_cap || rows.len() < 2 * self.config.min_leaf {
                None
            } else {
                self.best_split(&rows, &counts)
            };

        let id = self.nodes.len();
        match split {
            None => self.nodes.push(Node::Leaf(self.leaf(&counts, rows.len()))),
            Some(s) => {
                self.nodes.push(Node::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left: 0,
                    right: 0,
                });
                let left = self.grow(s.left, depth + 1);
                let right = self.grow(s.right, depth + 1);
                if let Node::Split {
                    left: l, right: r, ..
                } = &mut self.nodes[id]
                {
                    *l = left;
                    *r = right;
                }
            }
        }
        id
    }

    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.data.n_classes()];
        for &r in rows {
            counts[self.data.label(r)] += 1;
        }
        counts
    }

    fn leaf(&self, counts: &[usize], n: usize) -> CategoricalDistribution {
        let k = counts.len() as f64;
        let denom = n as f64 + k * self.config.alpha;
        CategoricalDistribution::from_trusted(
            counts
                .iter()
                .map(|&c| (c as f64 + self.config.alpha) / denom)
                .collect(),
        )
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let dim = self.data.dim();
        match self.config.max_features {
            Some(f) if f < dim => {
                let mut chosen = sample(&mut self.rng, dim, f).into_vec();
                chosen.sort_unstable();
                chosen
            }
            _ => (0..dim).collect(),
        }
    }

    /// Maximizes `Σ_child Σ_k n_ck² / n_c`, which is equivalent to maximizing
    /// the Gini gain. Features and thresholds are scanned in ascending order
    /// and only a strict improvement replaces the incumbent.
    fn best_split(&mut self, rows: &[usize], parent_counts: &[usize]) -> Option<SplitChoice> {
        let n = rows.len();
        let min_leaf = self.config.min_leaf;
        let parent_score = purity(parent_counts, n);
        let mut best: Option<(usize, f64, f64)> = None;

        for feature in self.candidate_features() {
            let mut sorted = rows.to_vec();
            sorted
                .sort_by(|&a, &b| self.data.row(a)[feature].total_cmp(&self.data.row(b)[feature]));
            let mut left = vec![0usize; parent_counts.len()];
            let mut right = parent_counts.to_vec();
            for i in 0..n - 1 {
                let label = self.data.label(sorted[i]);
                left[label] += 1;
                right[label] -= 1;
                let lo = self.data.row(sorted[i])[feature];
                let hi = self.data.row(sorted[i + 1])[feature];
                let n_left = i + 1;
                if lo == hi || n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let score = purity(&left, n_left) + purity(&right, n - n_left);
                if best.is_none_or(|(_, _, s)| score > s + SPLIT_EPS) {
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some((feature, threshold, score));
                }
            }
        }

        let (feature, threshold, score) = best?;
        if score <= parent_score + SPLIT_EPS {
            return None;
        }
        let (left, right) = rows
            .iter()
            .partition(|&&r| self.data.row(r)[feature] <= threshold);
        Some(SplitChoice {
            feature,
            threshold,
            left,
            right,
        })
    }
}

fn purity(counts: &[usize], n: usize) -> f64 {
    counts.iter().map(|&c| (c * c) as f64).sum::<f64>() / n as f64
}
