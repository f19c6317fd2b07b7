//! Spectral bisection of configuration sets.
//!
//! The first principal component of a point cloud can be approximated in
//! linear time with the FASTMAP heuristic of Faloutsos and Lin: pick a random
//! row, walk to the row furthest from it (`west`), then to the row furthest
//! from `west` (`east`). The west-east line stands in for the principal
//! direction, every row is projected onto it with the cosine law, and the set
//! is split at the median projection. Applying this recursively until a
//! region holds fewer than `multiplier * sqrt(N)` rows yields the leaf
//! clusters that the sampling policies draw from.
//!
//! Distances come from the 0/1 embedding of Boolean configurations, i.e. the
//! square root of the Hamming count, which coincides with the Euclidean
//! distance on the embedded vectors.

use serde::Serialize;
use serde_json::json;

use crate::dataset::{Configuration, MeasuredConfig};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Rng};

/// Distance between two configurations: the Euclidean distance of their 0/1
/// embeddings (square root of the number of differing bits). Symmetric, zero
/// exactly on equal configurations.
pub fn distance(a: &Configuration, b: &Configuration) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ArityMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let differing = a
        .bits()
        .iter()
        .zip(b.bits())
        .filter(|(x, y)| x != y)
        .count();
    Ok((differing as f64).sqrt())
}

/// The west-east pole pair of one cluster and the distance `c` between the
/// poles. `east` maximizes the distance from `west` by construction.
#[derive(Debug, Clone, Serialize)]
pub struct PoleLine {
    pub west: MeasuredConfig,
    pub east: MeasuredConfig,
    /// Distance between the poles; zero means the cluster is degenerate.
    pub c: f64,
    /// Index of `west` in the row list the line was computed from.
    pub west_index: usize,
    /// Index of `east` in the row list the line was computed from.
    pub east_index: usize,
}

/// Scans all rows and returns the index of the one furthest from `anchor`,
/// breaking ties toward the lowest index. Exactly `rows.len()` distance
/// computations.
fn furthest_from(anchor: &Configuration, rows: &[MeasuredConfig]) -> Result<(usize, f64)> {
    let mut best_idx = 0;
    let mut best_dist = f64::NEG_INFINITY;
    for (i, row) in rows.iter().enumerate() {
        let d = distance(anchor, &row.config)?;
        if d > best_dist {
            best_dist = d;
            best_idx = i;
        }
    }
    Ok((best_idx, best_dist))
}

/// Finds the pole pair of a row set.
///
/// Picks a random starting row, takes `west` as the row furthest from it and
/// `east` as the row furthest from `west`. Deterministic for a fixed seed;
/// ties break toward the lowest row index. Costs exactly `2 * rows.len()`
/// distance computations.
pub fn find_poles(rows: &[MeasuredConfig], seed: u64) -> Result<PoleLine> {
    if rows.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "pole finding needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    let mut rng = Rng::seed_from(seed);
    let start = rng.index(rows.len());
    let (west_index, _) = furthest_from(&rows[start].config, rows)?;
    let (east_index, c) = furthest_from(&rows[west_index].config, rows)?;
    Ok(PoleLine {
        west: rows[west_index].clone(),
        east: rows[east_index].clone(),
        c,
        west_index,
        east_index,
    })
}

/// Projects a configuration onto the pole line.
///
/// With `a = dist(west, x)`, `b = dist(east, x)` and `c` the pole distance,
/// the cosine-law projection is `(a^2 + c^2 - b^2) / (2c)`, which maps `west`
/// to 0 and `east` to `c`. Fails on a degenerate line (`c = 0`).
pub fn project(x: &Configuration, line: &PoleLine) -> Result<f64> {
    if line.c <= 0.0 {
        return Err(Error::DegenerateLine);
    }
    let a = distance(&line.west.config, x)?;
    let b = distance(&line.east.config, x)?;
    Ok((a * a + line.c * line.c - b * b) / (2.0 * line.c))
}

/// Parameters for the recursive bisection.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralParams {
    /// Scales the leaf threshold: a node with fewer than
    /// `multiplier * sqrt(N0)` rows becomes a leaf, where `N0` is the row
    /// count handed to `where_cluster` (computed once, not per node).
    pub leaf_threshold_multiplier: f64,
    pub seed: u64,
}

impl SpectralParams {
    pub fn new(seed: u64) -> Self {
        SpectralParams {
            leaf_threshold_multiplier: 1.0,
            seed,
        }
    }

    pub fn with_multiplier(mut self, multiplier: f64) -> Self {
        self.leaf_threshold_multiplier = multiplier;
        self
    }
}

/// A node of the bisection tree. Leaves partition the input rows.
#[derive(Debug, Clone)]
pub struct ClusterNode {
    pub rows: Vec<MeasuredConfig>,
    /// Pole line used at this node; `None` when the node became a leaf
    /// before poles were computed (it was already below the threshold).
    pub line: Option<PoleLine>,
    pub children: Option<(Box<ClusterNode>, Box<ClusterNode>)>,
    /// Seed derived for this node during construction; leaf-local
    /// re-sampling (pole picks, row picks) draws from it.
    pub seed: u64,
}

impl ClusterNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&ClusterNode> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a ClusterNode>) {
        match &self.children {
            None => out.push(self),
            Some((l, r)) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match &self.children {
            None => 1,
            Some((l, r)) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match &self.children {
            None => 0,
            Some((l, r)) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Debug dump of the tree: node sizes, pole indices, projections.
    /// Not a stability-guaranteed format.
    pub fn debug_json(&self) -> serde_json::Value {
        let mut node = json!({ "size": self.rows.len() });
        if let Some(line) = &self.line {
            node["poles"] = json!({
                "west": line.west_index,
                "east": line.east_index,
                "c": line.c,
            });
            if line.c > 0.0 {
                let projections: Vec<f64> = self
                    .rows
                    .iter()
                    .map(|r| project(&r.config, line).expect("line is non-degenerate"))
                    .collect();
                node["projections"] = json!(projections);
            }
        }
        if let Some((l, r)) = &self.children {
            node["children"] = json!([l.debug_json(), r.debug_json()]);
        }
        node
    }
}

/// Recursively bisects `rows` into a cluster tree.
///
/// Each node sorts its rows by (projection, original position) and gives the
/// first `floor(n/2)` to the left child, the rest to the right, so sibling
/// sizes never differ by more than one. Recursion stops when a node holds
/// fewer rows than the threshold or its poles coincide (degenerate line).
/// Child seeds derive from the parent seed, so identical inputs always build
/// identical trees.
pub fn where_cluster(rows: &[MeasuredConfig], params: &SpectralParams) -> Result<ClusterNode> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot cluster an empty row set".into(),
        ));
    }
    let multiplier = params.leaf_threshold_multiplier;
    if multiplier.is_nan() || multiplier <= 0.0 || multiplier.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "leaf threshold multiplier must be positive and finite, got {}",
            params.leaf_threshold_multiplier
        )));
    }
    let threshold = params.leaf_threshold_multiplier * (rows.len() as f64).sqrt();
    build_node(rows.to_vec(), threshold, params.seed)
}

fn build_node(rows: Vec<MeasuredConfig>, threshold: f64, seed: u64) -> Result<ClusterNode> {
    if rows.len() < 2 || (rows.len() as f64) < threshold {
        return Ok(ClusterNode {
            rows,
            line: None,
            children: None,
            seed,
        });
    }
    let line = find_poles(&rows, seed)?;
    if line.c <= 0.0 {
        // all rows coincide; nothing to project onto
        return Ok(ClusterNode {
            rows,
            line: Some(line),
            children: None,
            seed,
        });
    }
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        keyed.push((project(&row.config, &line)?, i));
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let split_at = rows.len() / 2;
    let left_rows: Vec<MeasuredConfig> = keyed[..split_at]
        .iter()
        .map(|&(_, i)| rows[i].clone())
        .collect();
    let right_rows: Vec<MeasuredConfig> = keyed[split_at..]
        .iter()
        .map(|&(_, i)| rows[i].clone())
        .collect();
    let left = build_node(left_rows, threshold, derive_seed(seed, 1))?;
    let right = build_node(right_rows, threshold, derive_seed(seed, 2))?;
    Ok(ClusterNode {
        rows,
        line: Some(line),
        children: Some((Box::new(left), Box::new(right))),
        seed,
    })
}
