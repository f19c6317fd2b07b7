//! Acceptance suite: one test per exit criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them).
//!
//! Criteria that need the real measured tables (apache.csv, bdbc.csv,
//! bdbj.csv, llvm.csv, x264.csv, sqlite.csv under `data/` at the workspace
//! root) run against them when present; otherwise they fall back to the
//! documented structural checks or report SKIP.

mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};

use common::{
    data_dir, popcount_tree, positive_distance_quantile, random_table, synthetic_additive,
};
use perfscout::cart::{self, CartParams, TreeNode};
use perfscout::dataset::{ConfigDataset, Configuration, MeasuredConfig};
use perfscout::eval::{self, RigSettings};
use perfscout::intrinsic;
use perfscout::optimize::{de_optimize, de_optimize_with, DeParams, ValidityPredicate};
use perfscout::rng::Rng;
use perfscout::sampling::{sample_s1, PolicySpec};
use perfscout::spectral::{distance, where_cluster, SpectralParams};

fn verdict(number: usize, name: &str, details: &[(String, bool)]) {
    for (label, ok) in details {
        println!("    [{}] {label}", if *ok { "ok" } else { "FAILED" });
    }
    let pass = details.iter().all(|(_, ok)| *ok);
    println!(
        "ACCEPTANCE {number} ({name}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {number} ({name}) failed");
}

fn prop_config() -> Config {
    Config {
        cases: 1024,
        failure_persistence: None,
        ..Config::default()
    }
}

/// Runs a property over at least 1000 random cases; returns a detail row.
fn property<S>(
    label: &str,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> (String, bool)
where
    S: Strategy,
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(prop_config());
    match runner.run(&strategy, check) {
        Ok(()) => (format!("{label} (1024 cases)"), true),
        Err(TestError::Fail(reason, value)) => (
            format!("{label}: failed for {value:?}: {reason}"),
            false,
        ),
        Err(TestError::Abort(reason)) => (format!("{label}: aborted: {reason}"), false),
    }
}

// ---------------------------------------------------------------------------
// 1. Sampling-budget reproduction
// ---------------------------------------------------------------------------

/// Mean S1 evaluation budget at a 40% train split over ten repeats.
fn mean_s1_budget(dataset: &ConfigDataset) -> f64 {
    let mut total = 0usize;
    for seed in 0..10u64 {
        let split = dataset.shuffle_split(0.4, seed).unwrap();
        let plan = PolicySpec::S1.run(&split.train, 1.0, seed).unwrap();
        total += plan.evaluations;
    }
    total as f64 / 10.0
}

#[test]
fn criterion_1_sampling_budget() {
    let targets = [
        ("apache", 16.0),
        ("bdbc", 64.0),
        ("bdbj", 16.0),
        ("llvm", 32.0),
        ("x264", 32.0),
    ];
    let dir = data_dir();
    let mut details = Vec::new();

    let real_tables_present = targets
        .iter()
        .all(|(name, _)| dir.join(format!("{name}.csv")).exists());

    if real_tables_present {
        for (name, target) in targets {
            let ds = ConfigDataset::load_csv(dir.join(format!("{name}.csv"))).unwrap();
            let budget = mean_s1_budget(&ds);
            let ok = budget >= 0.75 * target && budget <= 1.25 * target;
            details.push((
                format!("{name}: mean S1 budget {budget:.1} within 25% of {target}"),
                ok,
            ));
        }
    } else {
        // fallback 1: the structural bound on balanced synthetic spaces
        let mut bound_ok = true;
        for (rows, feats) in [(64usize, 8usize), (192, 9), (400, 12), (1024, 11), (2048, 13)] {
            let ds = random_table("bound", rows, feats, 17);
            for seed in 0..4u64 {
                let tree = where_cluster(&ds.rows, &SpectralParams::new(seed)).unwrap();
                let plan = sample_s1(&tree, seed);
                let bound = 2.0 * (rows as f64).sqrt() + 1.0;
                if plan.evaluations as f64 > bound {
                    bound_ok = false;
                }
            }
        }
        details.push((
            "S1 evaluations <= 2*sqrt(N) + 1 on balanced synthetic spaces".into(),
            bound_ok,
        ));

        // fallback 2: dimension-matched synthetic stand-ins hit the same
        // budget targets as the measured tables
        let shapes = [
            ("apache-like", 192usize, 9usize, 16.0),
            ("bdbc-like", 2560, 18, 64.0),
            ("bdbj-like", 400, 18, 16.0),
            ("llvm-like", 1024, 11, 32.0),
            ("x264-like", 1152, 16, 32.0),
        ];
        for (name, rows, feats, target) in shapes {
            let ds = random_table(name, rows, feats, 5);
            let budget = mean_s1_budget(&ds);
            let ok = budget >= 0.75 * target && budget <= 1.25 * target;
            details.push((
                format!("{name} ({rows} rows): mean S1 budget {budget:.1} within 25% of {target}"),
                ok,
            ));
        }
    }
    verdict(1, "sampling-budget reproduction", &details);
}

// ---------------------------------------------------------------------------
// 2. Accuracy reproduction on the measured tables
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_accuracy_reproduction() {
    let targets = [
        ("apache", 10.95),
        ("bdbc", 6.57),
        ("bdbj", 4.75),
        ("llvm", 3.32),
        ("x264", 6.93),
    ];
    let dir = data_dir();
    let present: Vec<_> = targets
        .iter()
        .filter(|(name, _)| dir.join(format!("{name}.csv")).exists())
        .collect();
    if present.is_empty() {
        println!(
            "ACCEPTANCE 2 (accuracy reproduction): SKIP - measured tables not present under {}",
            dir.display()
        );
        return;
    }
    let mut details = Vec::new();
    for (name, target) in present {
        let ds = ConfigDataset::load_csv(dir.join(format!("{name}.csv"))).unwrap();
        let settings = RigSettings::new(PolicySpec::S1);
        let report = eval::run_rig(&ds, &settings, &[0.4], 20, 1).unwrap();
        let mu = report.fractions[0].mean_mre;
        let ok = (mu - target).abs() <= 5.0;
        details.push((
            format!("{name}: 20-repeat mean MRE {mu:.2} within 5 points of {target}"),
            ok,
        ));
    }
    verdict(2, "accuracy reproduction", &details);
}

// ---------------------------------------------------------------------------
// 3. Plateau property on the synthetic additive dataset
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_plateau() {
    let ds = synthetic_additive(42);
    let fractions: Vec<f64> = (1..=9).map(|i| f64::from(i) / 10.0).collect();
    let settings = RigSettings::new(PolicySpec::S1);
    let report = eval::run_rig(&ds, &settings, &fractions, 20, 1).unwrap();

    let mu = |x: f64| -> f64 {
        report
            .fractions
            .iter()
            .find(|f| (f.fraction - x).abs() < 1e-9)
            .unwrap()
            .mean_mre
    };
    let grid_min = report
        .fractions
        .iter()
        .map(|f| f.mean_mre)
        .fold(f64::INFINITY, f64::min);
    let worst_band = report
        .fractions
        .iter()
        .filter(|f| f.fraction >= 0.4)
        .map(|f| f.mean_mre - grid_min)
        .fold(f64::NEG_INFINITY, f64::max);

    let details = vec![
        (
            format!("mu(0.4) = {:.3} <= mu(0.1) = {:.3}", mu(0.4), mu(0.1)),
            mu(0.4) <= mu(0.1),
        ),
        (
            format!("every X >= 0.4 within 1 MRE point of the grid minimum (worst {worst_band:.3})"),
            worst_band <= 1.0,
        ),
        (
            format!("reported elbow {:?} at or before 0.4", report.elbow),
            report.elbow.is_some_and(|e| e <= 0.4),
        ),
    ];
    verdict(3, "plateau property", &details);
}

// ---------------------------------------------------------------------------
// 4. Partition and metric property suites
// ---------------------------------------------------------------------------

fn arb_bits(arity: usize) -> impl Strategy<Value = Vec<bool>> {
    proptest::collection::vec(any::<bool>(), arity)
}

/// Random measured rows (duplicates allowed) over a proptest-chosen shape.
fn arb_rows() -> impl Strategy<Value = Vec<MeasuredConfig>> {
    (1usize..=8, 1usize..=64, any::<u64>()).prop_map(|(arity, n, seed)| {
        let mut rng = Rng::seed_from(seed);
        (0..n)
            .map(|_| {
                MeasuredConfig::new(
                    Configuration::new((0..arity).map(|_| rng.coin(0.5)).collect()),
                    1.0 + 100.0 * rng.next_f64(),
                )
                .unwrap()
            })
            .collect()
    })
}

/// Random distinct-configuration training sets with distinct performance
/// scores (strictly increasing values assigned in shuffled order).
fn arb_distinct_samples() -> impl Strategy<Value = Vec<MeasuredConfig>> {
    (2usize..=6, 2usize..=48, any::<u64>()).prop_map(|(arity, want, seed)| {
        let mut rng = Rng::seed_from(seed);
        let mut seen = HashSet::new();
        let mut bits = Vec::new();
        let cap = want.min(1 << arity);
        while bits.len() < cap {
            let b: Vec<bool> = (0..arity).map(|_| rng.coin(0.5)).collect();
            if seen.insert(b.clone()) {
                bits.push(b);
            }
        }
        let mut value = 1.0 + 10.0 * rng.next_f64();
        let mut rows: Vec<MeasuredConfig> = bits
            .into_iter()
            .map(|b| {
                value += 0.01 + rng.next_f64();
                MeasuredConfig::new(Configuration::new(b), value).unwrap()
            })
            .collect();
        rng.shuffle(&mut rows);
        rows
    })
}

fn sorted_keys(rows: &[MeasuredConfig]) -> Vec<(String, u64)> {
    let mut keys: Vec<(String, u64)> = rows
        .iter()
        .map(|r| (r.config.to_string(), r.performance.to_bits()))
        .collect();
    keys.sort();
    keys
}

/// Exhaustive-oracle check of every internal node of a fitted tree: the
/// chosen split must attain the minimal weighted deviation over all legal
/// candidate features, with ties broken to the lowest index.
fn check_split_optimality(
    tree: &TreeNode,
    samples: &[MeasuredConfig],
    idx: Vec<usize>,
    params: &CartParams,
) -> Result<(), TestCaseError> {
    let perfs: Vec<f64> = idx.iter().map(|&i| samples[i].performance).collect();
    let n = perfs.len() as f64;
    let mean = perfs.iter().sum::<f64>() / n;
    let sigma = (perfs.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n).sqrt();
    match tree {
        TreeNode::Leaf { prediction, count } => {
            prop_assert_eq!(*count, idx.len());
            prop_assert!((prediction - mean).abs() <= 1e-9 * mean.abs().max(1.0));
            Ok(())
        }
        TreeNode::Split {
            feature_index,
            left,
            right,
        } => {
            let arity = samples[0].config.len();
            let mut best: Option<(f64, usize)> = None;
            for f in 0..arity {
                let (l, r): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| !samples[i].config.bits()[f]);
                if l.len() < params.min_samples_leaf || r.len() < params.min_samples_leaf {
                    continue;
                }
                let pop_std = |part: &[usize]| -> f64 {
                    let vals: Vec<f64> = part.iter().map(|&i| samples[i].performance).collect();
                    let m = vals.iter().sum::<f64>() / vals.len() as f64;
                    (vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / vals.len() as f64)
                        .sqrt()
                };
                let w = (l.len() as f64 / n) * pop_std(&l) + (r.len() as f64 / n) * pop_std(&r);
                if best.is_none_or(|(bw, _)| w < bw) {
                    best = Some((w, f));
                }
            }
            let (best_w, best_f) = best.expect("a split node must have had a candidate");
            prop_assert_eq!(*feature_index, best_f);
            prop_assert!(best_w < sigma);
            let (l, r): (Vec<usize>, Vec<usize>) = idx
                .iter()
                .partition(|&&i| !samples[i].config.bits()[*feature_index]);
            check_split_optimality(left, samples, l, params)?;
            check_split_optimality(right, samples, r, params)
        }
    }
}

#[test]
fn criterion_4_partition_and_metric_invariants() {
    let mut details = Vec::new();

    details.push(property(
        "distance metric axioms",
        (1usize..=24).prop_flat_map(|arity| (arb_bits(arity), arb_bits(arity), arb_bits(arity))),
        |(a, b, c)| {
            let a = Configuration::new(a);
            let b = Configuration::new(b);
            let c = Configuration::new(c);
            let dab = distance(&a, &b).unwrap();
            let dba = distance(&b, &a).unwrap();
            let dac = distance(&a, &c).unwrap();
            let dcb = distance(&c, &b).unwrap();
            prop_assert!(dab >= 0.0);
            prop_assert_eq!(dab == 0.0, a == b);
            prop_assert_eq!(dab, dba);
            prop_assert!(dab <= dac + dcb + 1e-12);
            Ok(())
        },
    ));

    details.push(property(
        "leaf partition completeness",
        (arb_rows(), any::<u64>()),
        |(rows, seed)| {
            let tree = where_cluster(&rows, &SpectralParams::new(seed)).unwrap();
            let collected: Vec<MeasuredConfig> = tree
                .leaves()
                .iter()
                .flat_map(|l| l.rows.iter().cloned())
                .collect();
            prop_assert_eq!(sorted_keys(&collected), sorted_keys(&rows));
            Ok(())
        },
    ));

    details.push(property(
        "balanced-split depth bound",
        (arb_rows(), any::<u64>()),
        |(rows, seed)| {
            let n = rows.len() as f64;
            let threshold = n.sqrt();
            let tree = where_cluster(&rows, &SpectralParams::new(seed)).unwrap();
            let bound = (n / threshold).log2().ceil() as usize + 1;
            prop_assert!(
                tree.depth() <= bound,
                "depth {} exceeds bound {} for {} rows",
                tree.depth(),
                bound,
                rows.len()
            );
            Ok(())
        },
    ));

    details.push(property(
        "S1 picks exactly one row per leaf",
        (arb_rows(), any::<u64>(), any::<u64>()),
        |(rows, cluster_seed, sample_seed)| {
            let tree = where_cluster(&rows, &SpectralParams::new(cluster_seed)).unwrap();
            let plan = sample_s1(&tree, sample_seed);
            let leaves = tree.leaves();
            prop_assert_eq!(plan.chosen.len(), leaves.len());
            prop_assert_eq!(plan.evaluations, leaves.len());
            for (leaf, pick) in leaves.iter().zip(&plan.chosen) {
                prop_assert!(leaf.rows.contains(pick));
            }
            Ok(())
        },
    ));

    details.push(property(
        "CART split optimality vs exhaustive oracle (<= 64 rows)",
        (arb_distinct_samples(), 1usize..=3),
        |(samples, leaf_min)| {
            let params = CartParams {
                min_samples_split: leaf_min * 2,
                min_samples_leaf: leaf_min,
                max_depth: None,
            };
            let tree = cart::fit(&samples, &params).unwrap();
            let idx: Vec<usize> = (0..samples.len()).collect();
            check_split_optimality(&tree, &samples, idx, &params)
        },
    ));

    details.push(property(
        "zero training error for fully grown trees on distinct rows",
        arb_distinct_samples(),
        |samples| {
            let tree = cart::fit(&samples, &CartParams::fully_grown()).unwrap();
            for s in &samples {
                let predicted = cart::predict(&tree, &s.config).unwrap();
                prop_assert!(
                    (predicted - s.performance).abs() <= 1e-9 * s.performance,
                    "predicted {} for actual {}",
                    predicted,
                    s.performance
                );
            }
            Ok(())
        },
    ));

    verdict(4, "partition & metric invariants", &details);
}

// ---------------------------------------------------------------------------
// 5. Statistics correctness
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_statistics() {
    let mut details = Vec::new();

    details.push(property(
        "a12 identities (0.5 on identical lists, complement symmetry)",
        (
            proptest::collection::vec(0.0f64..100.0, 1..20),
            proptest::collection::vec(0.0f64..100.0, 1..20),
        ),
        |(xs, ys)| {
            prop_assert_eq!(eval::a12(&xs, &xs).unwrap(), 0.5);
            let fwd = eval::a12(&xs, &ys).unwrap();
            let rev = eval::a12(&ys, &xs).unwrap();
            prop_assert_eq!(fwd + rev, 1.0);
            Ok(())
        },
    ));

    // calibration: both samples always come from the same distribution, so
    // significant verdicts should appear at close to the 5% rate
    let trials = 400u64;
    let mut positives = 0u64;
    for t in 0..trials {
        let mut rng = Rng::seed_from(1_000_000 + t);
        let xs: Vec<f64> = (0..20).map(|_| 50.0 + 10.0 * rng.next_f64()).collect();
        let ys: Vec<f64> = (0..20).map(|_| 50.0 + 10.0 * rng.next_f64()).collect();
        if eval::bootstrap_significant(&xs, &ys, 1000, 0.95, 2_000_000 + t).unwrap() {
            positives += 1;
        }
    }
    let rate = positives as f64 / trials as f64;
    details.push((
        format!("bootstrap false-positive rate {rate:.4} within 5% +/- 2% over {trials} trials"),
        (0.03..=0.07).contains(&rate),
    ));

    let groups = vec![
        ("A".to_string(), vec![1.0, 1.0, 1.0]),
        ("B".to_string(), vec![1.0, 1.0, 1.0]),
        ("C".to_string(), vec![5.0, 5.0, 5.0]),
    ];
    let table = eval::scott_knott(&groups, 7).unwrap();
    let rank_of = |m: &str| table.entries.iter().find(|e| e.method == m).unwrap().rank;
    details.push((
        format!(
            "Scott-Knott on {{A~1, B~1, C~5}} gives ranks {{{}, {}, {}}}",
            rank_of("A"),
            rank_of("B"),
            rank_of("C")
        ),
        rank_of("A") == 1 && rank_of("B") == 1 && rank_of("C") == 2,
    ));

    verdict(5, "statistics correctness", &details);
}

// ---------------------------------------------------------------------------
// 6. Surrogate optimization
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_surrogate_optimization() {
    const ARITY: usize = 10;
    let mut details = Vec::new();

    // exhaustive ground truth over the 2^10 space
    let popcount = |c: &Configuration| c.bits().iter().filter(|&&b| b).count();
    let unconstrained_best = 0usize;
    let constrained_best = (0..1u32 << ARITY)
        .filter(|&i| i != 0)
        .map(|i| i.count_ones() as usize)
        .min()
        .unwrap();

    let mut hits_fn = 0;
    let mut hits_tree = 0;
    let tree = popcount_tree(ARITY);
    for seed in 0..100u64 {
        let params = DeParams::new(seed);
        let r = de_optimize_with(
            |c| Ok(popcount(c) as f64),
            ARITY,
            &ValidityPredicate::always_valid(),
            &params,
        )
        .unwrap();
        if r.predicted_performance == unconstrained_best as f64 {
            hits_fn += 1;
        }
        let r = de_optimize(&tree, ARITY, &ValidityPredicate::always_valid(), &params).unwrap();
        if r.predicted_performance == unconstrained_best as f64 {
            hits_tree += 1;
        }
    }
    details.push((
        format!("popcount surrogate reaches the exhaustive argmin in {hits_fn}/100 runs"),
        hits_fn >= 95,
    ));
    details.push((
        format!("tree-backed surrogate reaches the exhaustive argmin in {hits_tree}/100 runs"),
        hits_tree >= 95,
    ));

    // constraint excludes the optimum; the surrogate itself asserts that it
    // is never shown an invalid configuration
    let validity = ValidityPredicate::from_fn(|c| c.bits().iter().any(|&b| b));
    let mut hits_constrained = 0;
    let mut evaluated_valid = true;
    for seed in 0..100u64 {
        let params = DeParams::new(seed);
        let r = de_optimize_with(
            |c| {
                if !c.bits().iter().any(|&b| b) {
                    evaluated_valid = false;
                }
                Ok(popcount(c) as f64)
            },
            ARITY,
            &validity,
            &params,
        )
        .unwrap();
        if r.predicted_performance == constrained_best as f64 && popcount(&r.best_config) == 1 {
            hits_constrained += 1;
        }
    }
    details.push((
        format!(
            "with the optimum excluded, the brute-force best valid value is found in {hits_constrained}/100 runs"
        ),
        hits_constrained >= 95,
    ));
    details.push((
        "every configuration evaluated by the surrogate satisfied validity".into(),
        evaluated_valid,
    ));

    verdict(6, "surrogate optimization", &details);
}

// ---------------------------------------------------------------------------
// 7. Intrinsic dimension
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_intrinsic_dimension() {
    let mut details = Vec::new();

    // synthetic manifolds, 500 points each; the slope is read off the
    // small-radius scaling range (2nd..20th percentile of the positive
    // pairwise distances), before boundary saturation flattens the curve
    let estimate = |points: &[Vec<f64>]| -> f64 {
        let r0 = positive_distance_quantile(points, 0.02);
        let rmax = positive_distance_quantile(points, 0.20);
        intrinsic::intrinsic_dimension(points, r0, rmax, 20)
            .unwrap()
            .dimension
    };

    let mut rng = Rng::seed_from(77);
    let unit = 1.0 / 5.0f64.sqrt();
    let segment: Vec<Vec<f64>> = (0..500)
        .map(|_| {
            let t = rng.next_f64();
            (0..5).map(|_| t * unit).collect()
        })
        .collect();
    let seg_dim = estimate(&segment);
    details.push((
        format!("1-D segment in 5-D ambient: estimate {seg_dim:.3} within 1.0 +/- 0.25"),
        (seg_dim - 1.0).abs() <= 0.25,
    ));

    let mut rng = Rng::seed_from(78);
    let square: Vec<Vec<f64>> = (0..500)
        .map(|_| vec![rng.next_f64(), rng.next_f64()])
        .collect();
    let sq_dim = estimate(&square);
    details.push((
        format!("uniform unit square: estimate {sq_dim:.3} within 2.0 +/- 0.3"),
        (sq_dim - 2.0).abs() <= 0.3,
    ));

    let mut rng = Rng::seed_from(79);
    let cube: Vec<Vec<f64>> = (0..500)
        .map(|_| vec![rng.next_f64(), rng.next_f64(), rng.next_f64()])
        .collect();
    let cube_dim = estimate(&cube);
    for (label, dim, ambient) in [
        ("segment", seg_dim, 5.0),
        ("square", sq_dim, 2.0),
        ("cube", cube_dim, 3.0),
    ] {
        details.push((
            format!("{label}: estimate {dim:.3} <= ambient {ambient} + 0.3"),
            dim <= ambient + 0.3,
        ));
    }

    let sqlite = data_dir().join("sqlite.csv");
    if sqlite.exists() {
        let ds = ConfigDataset::load_csv(&sqlite).unwrap();
        let configs: Vec<Configuration> = ds.rows.iter().map(|r| r.config.clone()).collect();
        let points = intrinsic::embed_configurations(&configs);
        let (r0, rmax) = intrinsic::default_radius_range(&points).unwrap();
        let est = intrinsic::intrinsic_dimension(&points, r0, rmax, 20).unwrap();
        details.push((
            format!("sqlite table: estimate {:.3} within 1.61 +/- 0.4", est.dimension),
            (est.dimension - 1.61).abs() <= 0.4,
        ));
    } else {
        println!("    [--] sqlite table not present; the 1.61 check is dataset-dependent and skipped");
    }

    verdict(7, "intrinsic dimension", &details);
}

// ---------------------------------------------------------------------------
// 8. CLI determinism
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_cli_determinism() {
    use std::process::Command;

    let bin = env!("CARGO_BIN_EXE_perfscout");
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("table.csv");
    synthetic_additive(9).write_csv(&data).unwrap();

    let mre_a = dir.path().join("method_a.mre");
    let mre_b = dir.path().join("method_b.mre");
    std::fs::write(&mre_a, "10.0 11.0 9.5 10.2 10.8\n").unwrap();
    std::fs::write(&mre_b, "[20.0, 21.0, 19.5, 20.2]\n").unwrap();

    let model = dir.path().join("model.json");
    let data_s = data.to_str().unwrap();
    let model_s = model.to_str().unwrap();

    // train first so optimize has its model input
    let train_args = vec![
        "train", "--data", data_s, "--policy", "s1", "--fraction", "0.4", "--seed", "3", "--out",
        model_s,
    ];
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "rig", "--data", data_s, "--policy", "s1", "--fractions", "0.2,0.4", "--repeats",
            "3", "--seed", "1",
        ],
        vec![
            "rank",
            mre_a.to_str().unwrap(),
            mre_b.to_str().unwrap(),
            "--seed",
            "2",
        ],
        train_args.clone(),
        vec![
            "sample", "--data", data_s, "--policy", "s2", "--fraction", "0.4", "--seed", "4",
        ],
        vec![
            "optimize", "--model", model_s, "--seed", "5", "--generations", "10",
        ],
        vec!["dim", "--data", data_s, "--steps", "10"],
        vec![
            "rig", "--data", data_s, "--policy", "s1", "--fractions", "0.4", "--repeats", "2",
            "--seed", "1", "--format", "text",
        ],
    ];

    let mut details = Vec::new();
    for args in &commands {
        let run = || {
            let out = Command::new(bin)
                .args(args)
                .output()
                .expect("binary runs");
            assert!(
                out.status.success(),
                "{:?} failed: {}",
                args,
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        };
        let first = run();
        let second = run();
        let model_once = model.exists().then(|| std::fs::read(&model).unwrap());
        let third = run();
        let model_twice = model.exists().then(|| std::fs::read(&model).unwrap());
        let stable = first == second && second == third && model_once == model_twice;
        details.push((
            format!("{} {}: byte-identical output across reruns", args[0], args[1]),
            stable,
        ));
    }
    verdict(8, "CLI determinism", &details);
}
