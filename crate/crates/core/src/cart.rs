//! Regression-tree learner for Boolean configurations.
//!
//! Splits are binary on a single feature (false goes left, true goes right)
//! and chosen to minimize the size-weighted standard deviation of the two
//! sides, `(|A|/N) * sigma_A + (|B|/N) * sigma_B`, using the population
//! deviation so singleton sides contribute zero. Growth stops when no split
//! strictly improves on the node's own deviation or when the size/depth
//! limits bind. No pruning, no surrogate splits.

use serde::{Deserialize, Serialize};

use crate::dataset::{Configuration, MeasuredConfig};
use crate::error::{Error, Result};
use crate::util::{mean, pop_std};

/// A fitted tree: either a leaf predicting the mean performance of its
/// training members, or a split on one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        prediction: f64,
        count: usize,
    },
    Split {
        feature_index: usize,
        /// Subtree for rows where the feature is false.
        left: Box<TreeNode>,
        /// Subtree for rows where the feature is true.
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    /// Highest feature index referenced anywhere in the tree.
    pub fn max_feature_index(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split {
                feature_index,
                left,
                right,
            } => {
                let child = left.max_feature_index().max(right.max_feature_index());
                Some(child.map_or(*feature_index, |c| c.max(*feature_index)))
            }
        }
    }
}

/// Hyperparameters for tree growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartParams {
    /// A node with fewer rows than this becomes a leaf.
    pub min_samples_split: usize,
    /// Both sides of a candidate split must keep at least this many rows.
    pub min_samples_leaf: usize,
    /// Optional bound on the number of split levels.
    pub max_depth: Option<usize>,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            min_samples_split: 4,
            min_samples_leaf: 1,
            max_depth: None,
        }
    }
}

impl CartParams {
    /// Fully grown trees: split while any improving split exists.
    pub fn fully_grown() -> Self {
        CartParams {
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_depth: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::InvalidArgument(
                "min_samples_split must be at least 2".into(),
            ));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidArgument(
                "min_samples_leaf must be at least 1".into(),
            ));
        }
        if self.min_samples_leaf * 2 > self.min_samples_split {
            return Err(Error::InvalidArgument(format!(
                "min_samples_leaf {} is incompatible with min_samples_split {}",
                self.min_samples_leaf, self.min_samples_split
            )));
        }
        Ok(())
    }
}

/// Fits a regression tree to measured configurations.
///
/// Deterministic: candidate features are scanned in index order and ties on
/// the split criterion keep the lowest feature index.
pub fn fit(samples: &[MeasuredConfig], params: &CartParams) -> Result<TreeNode> {
    params.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidData("empty sample set".into()));
    }
    let arity = samples[0].config.len();
    for s in samples {
        if s.config.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                actual: s.config.len(),
            });
        }
    }
    let idx: Vec<usize> = (0..samples.len()).collect();
    Ok(grow(samples, idx, arity, 0, params))
}

fn grow(
    samples: &[MeasuredConfig],
    idx: Vec<usize>,
    arity: usize,
    depth: usize,
    params: &CartParams,
) -> TreeNode {
    let perfs: Vec<f64> = idx.iter().map(|&i| samples[i].performance).collect();
    let node_mean = mean(&perfs);
    let node_sigma = pop_std(&perfs);
    let leaf = || TreeNode::Leaf {
        prediction: node_mean,
        count: idx.len(),
    };

    if idx.len() < params.min_samples_split
        || node_sigma == 0.0
        || params.max_depth.is_some_and(|d| depth >= d)
    {
        return leaf();
    }

    let n = idx.len() as f64;
    let mut best: Option<(f64, usize, Vec<usize>, Vec<usize>)> = None;
    for feature in 0..arity {
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| !samples[i].config.bits()[feature]);
        if left.len() < params.min_samples_leaf || right.len() < params.min_samples_leaf {
            continue;
        }
        let sigma_left = pop_std(&left.iter().map(|&i| samples[i].performance).collect::<Vec<_>>());
        let sigma_right =
            pop_std(&right.iter().map(|&i| samples[i].performance).collect::<Vec<_>>());
        let weighted = (left.len() as f64 / n) * sigma_left + (right.len() as f64 / n) * sigma_right;
        if best.as_ref().is_none_or(|(w, ..)| weighted < *w) {
            best = Some((weighted, feature, left, right));
        }
    }

    match best {
        Some((weighted, feature, left, right)) if weighted < node_sigma => TreeNode::Split {
            feature_index: feature,
            left: Box::new(grow(samples, left, arity, depth + 1, params)),
            right: Box::new(grow(samples, right, arity, depth + 1, params)),
        },
        _ => leaf(),
    }
}

/// Routes a configuration to its leaf and returns the leaf's prediction.
pub fn predict(tree: &TreeNode, config: &Configuration) -> Result<f64> {
    let mut node = tree;
    loop {
        match node {
            TreeNode::Leaf { prediction, .. } => return Ok(*prediction),
            TreeNode::Split {
                feature_index,
                left,
                right,
            } => {
                let Some(&bit) = config.bits().get(*feature_index) else {
                    return Err(Error::ArityMismatch {
                        expected: feature_index + 1,
                        actual: config.len(),
                    });
                };
                node = if bit { right } else { left };
            }
        }
    }
}
