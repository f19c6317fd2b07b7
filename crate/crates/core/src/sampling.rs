//! Sampling policies over cluster trees.
//!
//! A policy decides which clustered configurations get their performance
//! looked up (a table lookup in this rig; compiling and benchmarking a real
//! system in the field). `evaluations` on the resulting plan is the budget
//! metric reported everywhere.
//!
//! The minimal policies draw from leaf clusters: one random row per leaf
//! (S1) or both poles per leaf (S2). S3 is the non-minimal baseline that
//! pays for every row and returns the best one. Two random baselines round
//! out the set: a flat k-row sample and a progressive sample growing in
//! steps of the feature count.

use serde::{Deserialize, Serialize};

use crate::dataset::{ConfigDataset, MeasuredConfig};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Rng};
use crate::spectral::{find_poles, where_cluster, ClusterNode, SpectralParams};

/// A sampling policy together with its parameters.
///
/// `FullTrain` is the oracle baseline that measures the whole training set;
/// it exists so the experiment rig can report the floor that the minimal
/// policies are judged against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum PolicySpec {
    S1,
    S2,
    S3,
    RandomK { k: usize },
    Progressive2N { rounds: usize },
    FullTrain,
}

impl PolicySpec {
    pub fn label(&self) -> String {
        match self {
            PolicySpec::S1 => "s1".into(),
            PolicySpec::S2 => "s2".into(),
            PolicySpec::S3 => "s3".into(),
            PolicySpec::RandomK { k } => format!("random_k({k})"),
            PolicySpec::Progressive2N { rounds } => format!("progressive({rounds}n)"),
            PolicySpec::FullTrain => "full_train".into(),
        }
    }

    /// Runs the policy against one training set: clusters when the policy
    /// needs leaves, then picks rows. Seeds for the clustering and sampling
    /// stages derive from `seed`.
    pub fn run(
        &self,
        train: &ConfigDataset,
        leaf_threshold_multiplier: f64,
        seed: u64,
    ) -> Result<SamplePlan> {
        match self {
            PolicySpec::S1 | PolicySpec::S2 | PolicySpec::S3 => {
                let params = SpectralParams::new(derive_seed(seed, 0))
                    .with_multiplier(leaf_threshold_multiplier);
                let tree = where_cluster(&train.rows, &params)?;
                match self {
                    PolicySpec::S1 => Ok(sample_s1(&tree, derive_seed(seed, 1))),
                    PolicySpec::S2 => sample_s2(&tree),
                    PolicySpec::S3 => Ok(sample_s3(&tree)),
                    _ => unreachable!(),
                }
            }
            PolicySpec::RandomK { k } => sample_random_k(&train.rows, *k, derive_seed(seed, 1)),
            PolicySpec::Progressive2N { rounds } => {
                sample_progressive_2n(&train.rows, train.arity(), *rounds, derive_seed(seed, 1))
            }
            PolicySpec::FullTrain => Ok(SamplePlan {
                policy: PolicySpec::FullTrain,
                chosen: train.rows.clone(),
                evaluations: train.rows.len(),
            }),
        }
    }
}

/// The outcome of a sampling policy: which rows to measure and how many
/// performance lookups that consumed.
#[derive(Debug, Clone, Serialize)]
pub struct SamplePlan {
    pub policy: PolicySpec,
    pub chosen: Vec<MeasuredConfig>,
    pub evaluations: usize,
}

/// One uniformly random row per leaf cluster. Each leaf draws from its own
/// derived stream, so the pick is deterministic given the seed and
/// independent of any other leaf.
pub fn sample_s1(tree: &ClusterNode, seed: u64) -> SamplePlan {
    let mut chosen = Vec::new();
    for (ordinal, leaf) in tree.leaves().into_iter().enumerate() {
        let mut rng = Rng::seed_from(derive_seed(seed, ordinal as u64));
        chosen.push(leaf.rows[rng.index(leaf.rows.len())].clone());
    }
    let evaluations = chosen.len();
    SamplePlan {
        policy: PolicySpec::S1,
        chosen,
        evaluations,
    }
}

/// The east and west poles of every leaf cluster, recomputed per leaf from
/// the leaf's own seed. A single-row leaf contributes its one row; if the
/// poles coincide the row is taken once.
pub fn sample_s2(tree: &ClusterNode) -> Result<SamplePlan> {
    let mut chosen = Vec::new();
    for leaf in tree.leaves() {
        if leaf.rows.len() == 1 {
            chosen.push(leaf.rows[0].clone());
            continue;
        }
        let line = find_poles(&leaf.rows, leaf.seed)?;
        chosen.push(line.west.clone());
        if line.east_index != line.west_index {
            chosen.push(line.east.clone());
        }
    }
    let evaluations = chosen.len();
    Ok(SamplePlan {
        policy: PolicySpec::S2,
        chosen,
        evaluations,
    })
}

/// The non-minimal baseline: every leaf row is measured and the single row
/// with the lowest performance is returned, ties broken toward the lowest
/// original index. `evaluations` is therefore the total row count.
pub fn sample_s3(tree: &ClusterNode) -> SamplePlan {
    // the root holds the input rows in their original order
    let best = tree
        .rows
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.performance.total_cmp(&b.performance).then(ia.cmp(ib)))
        .map(|(_, r)| r.clone())
        .expect("cluster trees are built from at least one row");
    SamplePlan {
        policy: PolicySpec::S3,
        chosen: vec![best],
        evaluations: tree.rows.len(),
    }
}

/// `k` distinct uniformly random rows.
pub fn sample_random_k(rows: &[MeasuredConfig], k: usize, seed: u64) -> Result<SamplePlan> {
    if k == 0 || k > rows.len() {
        return Err(Error::InvalidArgument(format!(
            "k must lie in 1..={}, got {k}",
            rows.len()
        )));
    }
    Ok(SamplePlan {
        policy: PolicySpec::RandomK { k },
        chosen: draw_distinct(rows, k, seed),
        evaluations: k,
    })
}

/// Progressive random sampling: a cumulative sample of
/// `rounds * n_features` distinct rows (`rounds = 2` is the common "2N"
/// comparator).
pub fn sample_progressive_2n(
    rows: &[MeasuredConfig],
    n_features: usize,
    rounds: usize,
    seed: u64,
) -> Result<SamplePlan> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    if n_features == 0 {
        return Err(Error::InvalidArgument(
            "feature count must be at least 1".into(),
        ));
    }
    let want = rounds * n_features;
    if want > rows.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {want} rows but only {} are available",
            rows.len()
        )));
    }
    Ok(SamplePlan {
        policy: PolicySpec::Progressive2N { rounds },
        chosen: draw_distinct(rows, want, seed),
        evaluations: want,
    })
}

/// Partial Fisher-Yates: the first `k` entries of a seeded permutation.
fn draw_distinct(rows: &[MeasuredConfig], k: usize, seed: u64) -> Vec<MeasuredConfig> {
    let mut rng = Rng::seed_from(seed);
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    for i in 0..k {
        let j = i + rng.index(rows.len() - i);
        idx.swap(i, j);
    }
    idx[..k].iter().map(|&i| rows[i].clone()).collect()
}
