//! Shared generators for the integration suites.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use perfscout::cart::TreeNode;
use perfscout::dataset::{ConfigDataset, Configuration, MeasuredConfig};
use perfscout::rng::Rng;

/// Synthetic additive benchmark: 10 Boolean features, 1024 rows (the full
/// space), performance = base + weighted sum + 1% multiplicative noise.
/// Weights decay geometrically (60, 15, 3.75, ...), the dominant-option
/// profile that configurable systems show in practice.
pub fn synthetic_additive(seed: u64) -> ConfigDataset {
    let mut rng = Rng::seed_from(seed);
    let weights: Vec<f64> = (0..10).map(|k| 60.0 / 4.0f64.powi(k)).collect();
    let rows: Vec<MeasuredConfig> = (0..1024u32)
        .map(|i| {
            let bits: Vec<bool> = (0..10).map(|b| (i >> b) & 1 == 1).collect();
            let base: f64 = 10.0
                + bits
                    .iter()
                    .zip(&weights)
                    .map(|(&b, &w)| if b { w } else { 0.0 })
                    .sum::<f64>();
            let noise = 1.0 + 0.01 * (2.0 * rng.next_f64() - 1.0);
            MeasuredConfig::new(Configuration::new(bits), base * noise).unwrap()
        })
        .collect();
    let names = (0..10).map(|i| format!("f{i}")).collect();
    ConfigDataset::new("synthetic-additive", names, rows).unwrap()
}

/// A table of `n_rows` distinct random configurations over `n_features`
/// options with positive random performance scores.
pub fn random_table(name: &str, n_rows: usize, n_features: usize, seed: u64) -> ConfigDataset {
    assert!(n_rows <= 1 << n_features.min(30), "space too small");
    let mut rng = Rng::seed_from(seed);
    let mut rows = Vec::with_capacity(n_rows);
    let mut seen = HashSet::new();
    while rows.len() < n_rows {
        let bits: Vec<bool> = (0..n_features).map(|_| rng.coin(0.5)).collect();
        if seen.insert(bits.clone()) {
            rows.push(
                MeasuredConfig::new(Configuration::new(bits), 1.0 + 100.0 * rng.next_f64())
                    .unwrap(),
            );
        }
    }
    let names = (0..n_features).map(|i| format!("f{i}")).collect();
    ConfigDataset::new(name, names, rows).unwrap()
}

/// A complete popcount surrogate: predicts the number of set bits.
pub fn popcount_tree(arity: usize) -> TreeNode {
    fn build(arity: usize, depth: usize, acc: usize) -> TreeNode {
        if depth == arity {
            TreeNode::Leaf {
                prediction: acc as f64,
                count: 1,
            }
        } else {
            TreeNode::Split {
                feature_index: depth,
                left: Box::new(build(arity, depth + 1, acc)),
                right: Box::new(build(arity, depth + 1, acc + 1)),
            }
        }
    }
    build(arity, 0, 0)
}

/// Directory holding optional measured tables (apache.csv, bdbc.csv, ...).
/// When the PROMISE tables are placed there, the dataset-dependent
/// acceptance checks run against them.
pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("data")
}

/// q-th quantile of the positive pairwise distances of a point set.
pub fn positive_distance_quantile(points: &[Vec<f64>], q: f64) -> f64 {
    let mut d = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let dist: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if dist > 0.0 {
                d.push(dist);
            }
        }
    }
    assert!(!d.is_empty(), "all points coincide");
    d.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (d.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        d[lo]
    } else {
        let w = pos - lo as f64;
        d[lo] * (1.0 - w) + d[hi] * w
    }
}
