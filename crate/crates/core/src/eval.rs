//! Scoring, the repeated-experiment rig, and statistical ranking.
//!
//! The rig repeats the whole pipeline (shuffle, split, cluster, sample,
//! fit, score) across a grid of train fractions and reports, per fraction,
//! the mean and standard deviation of the relative prediction error along
//! with the evaluation budget the policy consumed. Everything is driven by
//! derived seeds, so a report is a pure function of its inputs.
//!
//! Method comparison uses a non-parametric toolkit: the A12 effect size,
//! a pooled bootstrap test for significance, and Scott-Knott to group
//! methods into statistically indistinguishable rank clusters.

use serde::{Deserialize, Serialize};

use crate::cart::{self, CartParams};
use crate::dataset::ConfigDataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, Rng};
use crate::sampling::PolicySpec;
use crate::util::{mean, pop_std, quantile_sorted};

/// Magnitude of relative error, in percent: `|predicted - actual| / actual * 100`.
pub fn mre(predicted: f64, actual: f64) -> Result<f64> {
    if actual.is_nan() || actual <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "actual value must be positive, got {actual}"
        )));
    }
    Ok((predicted - actual).abs() / actual * 100.0)
}

/// Settings shared by every repeat of the rig.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RigSettings {
    pub policy: PolicySpec,
    pub leaf_threshold_multiplier: f64,
    pub cart: CartParams,
    /// A fraction counts as "on the plateau" when its mean error is within
    /// this many MRE points of the grid minimum.
    pub elbow_tolerance: f64,
}

impl RigSettings {
    pub fn new(policy: PolicySpec) -> Self {
        RigSettings {
            policy,
            leaf_threshold_multiplier: 1.0,
            cart: CartParams::default(),
            elbow_tolerance: 1.0,
        }
    }
}

/// Per-fraction aggregate over all repeats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FractionReport {
    pub fraction: f64,
    /// Mean over repeats of the per-repeat mean MRE (percent).
    pub mean_mre: f64,
    /// Standard deviation of the per-repeat mean MREs (percent).
    pub std_mre: f64,
    pub mean_evaluations: f64,
    pub mre_per_repeat: Vec<f64>,
    pub evaluations_per_repeat: Vec<usize>,
}

/// Outcome of the repeated train-fraction experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigReport {
    pub dataset: String,
    pub policy: PolicySpec,
    pub repeats: usize,
    pub base_seed: u64,
    /// Per-repeat shuffle seeds, derived from the base seed.
    pub repeat_seeds: Vec<u64>,
    pub fractions: Vec<FractionReport>,
    /// Smallest fraction whose mean MRE is within `elbow_tolerance` of the
    /// grid minimum.
    pub elbow: Option<f64>,
    pub elbow_tolerance: f64,
}

impl RigReport {
    /// Aligned-column rendering for humans.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "dataset: {}  policy: {}  repeats: {}  seed: {}\n",
            self.dataset,
            self.policy.label(),
            self.repeats,
            self.base_seed
        ));
        out.push_str("fraction  mean_mre  std_mre   mean_evals\n");
        for f in &self.fractions {
            out.push_str(&format!(
                "{:<8.2}  {:<8.3}  {:<8.3}  {:<10.1}\n",
                f.fraction, f.mean_mre, f.std_mre, f.mean_evaluations
            ));
        }
        match self.elbow {
            Some(x) => out.push_str(&format!(
                "elbow: {:.2} (tolerance {:.2} MRE points)\n",
                x, self.elbow_tolerance
            )),
            None => out.push_str("elbow: n/a\n"),
        }
        out
    }

    /// The `(fraction, mean, std)` curve as CSV, for external plotting.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("fraction,mean_mre,std_mre,mean_evaluations\n");
        for f in &self.fractions {
            out.push_str(&format!(
                "{},{},{},{}\n",
                f.fraction, f.mean_mre, f.std_mre, f.mean_evaluations
            ));
        }
        out
    }
}

/// Runs the full experiment rig.
///
/// For every repeat the row order is reshuffled once (seed derived from
/// `base_seed` and the repeat number); every fraction of the grid then takes
/// the first `floor(X * n)` shuffled rows as its training side, mirroring a
/// sweep over a single randomized table. The policy samples the training
/// side, a tree is fitted to the sampled rows only, and the mean MRE is
/// scored against the full test side.
pub fn run_rig(
    dataset: &ConfigDataset,
    settings: &RigSettings,
    fractions: &[f64],
    repeats: usize,
    base_seed: u64,
) -> Result<RigReport> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    if fractions.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one train fraction is required".into(),
        ));
    }

    let repeat_seeds: Vec<u64> = (0..repeats)
        .map(|r| derive_seed(base_seed, r as u64))
        .collect();

    let mut per_fraction: Vec<FractionReport> = fractions
        .iter()
        .map(|&fraction| FractionReport {
            fraction,
            mean_mre: 0.0,
            std_mre: 0.0,
            mean_evaluations: 0.0,
            mre_per_repeat: Vec::with_capacity(repeats),
            evaluations_per_repeat: Vec::with_capacity(repeats),
        })
        .collect();

    for (r, &shuffle_seed) in repeat_seeds.iter().enumerate() {
        for (fi, &fraction) in fractions.iter().enumerate() {
            let split = dataset.shuffle_split(fraction, shuffle_seed)?;
            let stage_seed = derive_seed(shuffle_seed, 0x100 + fi as u64);
            let plan = settings.policy.run(
                &split.train,
                settings.leaf_threshold_multiplier,
                stage_seed,
            )?;
            let tree = cart::fit(&plan.chosen, &settings.cart)?;
            let mut errors = Vec::with_capacity(split.test.len());
            for row in &split.test.rows {
                let predicted = cart::predict(&tree, &row.config)?;
                errors.push(mre(predicted, row.performance)?);
            }
            if errors.is_empty() {
                return Err(Error::Degenerate(format!(
                    "fraction {fraction} leaves no test rows (repeat {r})"
                )));
            }
            per_fraction[fi].mre_per_repeat.push(mean(&errors));
            per_fraction[fi]
                .evaluations_per_repeat
                .push(plan.evaluations);
        }
    }

    for f in &mut per_fraction {
        f.mean_mre = mean(&f.mre_per_repeat);
        f.std_mre = pop_std(&f.mre_per_repeat);
        f.mean_evaluations = mean(
            &f.evaluations_per_repeat
                .iter()
                .map(|&e| e as f64)
                .collect::<Vec<_>>(),
        );
    }

    let curve: Vec<(f64, f64)> = per_fraction
        .iter()
        .map(|f| (f.fraction, f.mean_mre))
        .collect();
    let elbow = elbow_fraction(&curve, settings.elbow_tolerance);

    Ok(RigReport {
        dataset: dataset.name.clone(),
        policy: settings.policy,
        repeats,
        base_seed,
        repeat_seeds,
        fractions: per_fraction,
        elbow,
        elbow_tolerance: settings.elbow_tolerance,
    })
}

/// Smallest x whose mean error is within `tolerance` of the curve minimum.
pub fn elbow_fraction(curve: &[(f64, f64)], tolerance: f64) -> Option<f64> {
    if curve.is_empty() {
        return None;
    }
    let min = curve.iter().map(|&(_, y)| y).fold(f64::INFINITY, f64::min);
    let mut sorted = curve.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    sorted
        .iter()
        .find(|&&(_, y)| y <= min + tolerance)
        .map(|&(x, _)| x)
}

/// Vargha-Delaney effect size: the probability (with half credit for ties)
/// that a value drawn from `xs` exceeds one drawn from `ys`.
pub fn a12(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidArgument(
            "effect size needs non-empty samples".into(),
        ));
    }
    let mut more = 0u64;
    let mut ties = 0u64;
    for &x in xs {
        for &y in ys {
            if x > y {
                more += 1;
            } else if x == y {
                ties += 1;
            }
        }
    }
    Ok((more as f64 + 0.5 * ties as f64) / (xs.len() as f64 * ys.len() as f64))
}

/// Non-parametric bootstrap test of mean difference at the given confidence.
///
/// Pools both samples, repeatedly resamples two lists of the original sizes
/// from the pool, and checks whether the observed mean difference falls
/// outside the central `confidence` interval of that null distribution.
pub fn bootstrap_significant(
    xs: &[f64],
    ys: &[f64],
    iterations: usize,
    confidence: f64,
    seed: u64,
) -> Result<bool> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidArgument(
            "bootstrap needs non-empty samples".into(),
        ));
    }
    if iterations < 100 {
        return Err(Error::InvalidArgument(
            "bootstrap needs at least 100 iterations".into(),
        ));
    }
    if confidence.is_nan() || confidence <= 0.0 || confidence >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "confidence must lie in (0, 1), got {confidence}"
        )));
    }
    let observed = mean(xs) - mean(ys);
    let pool: Vec<f64> = xs.iter().chain(ys.iter()).copied().collect();
    let mut rng = Rng::seed_from(seed);
    let mut resample_mean = |n: usize| -> f64 {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += pool[rng.index(pool.len())];
        }
        sum / n as f64
    };
    let mut deltas = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        let a = resample_mean(xs.len());
        let b = resample_mean(ys.len());
        deltas.push(a - b);
    }
    deltas.sort_by(f64::total_cmp);
    let alpha = 1.0 - confidence;
    let lo = quantile_sorted(&deltas, alpha / 2.0);
    let hi = quantile_sorted(&deltas, 1.0 - alpha / 2.0);
    Ok(observed < lo || observed > hi)
}

const SK_BOOTSTRAP_ITERATIONS: usize = 1000;
const SK_CONFIDENCE: f64 = 0.95;
/// Effect sizes below this are "small" and do not justify separating groups.
const SK_SMALL_EFFECT: f64 = 0.6;

/// One row of a rank table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankEntry {
    pub method: String,
    pub rank: usize,
    pub mean_mre: f64,
    pub std_mre: f64,
    /// Evaluation budget, when the caller knows it (rank tables built from
    /// bare error samples leave it unset).
    pub evaluations: Option<f64>,
}

/// Methods grouped into rank clusters; rank 1 is best (lowest mean).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankTable {
    pub entries: Vec<RankEntry>,
}

impl RankTable {
    pub fn to_text(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|e| e.method.len())
            .max()
            .unwrap_or(6)
            .max(6);
        let mut out = format!("{:<4}  {:<width$}  {:<9}  {:<9}  evals\n", "rank", "method", "mean_mre", "std_mre");
        for e in &self.entries {
            let evals = e
                .evaluations
                .map_or_else(|| "-".to_string(), |v| format!("{v:.1}"));
            out.push_str(&format!(
                "{:<4}  {:<width$}  {:<9.3}  {:<9.3}  {}\n",
                e.rank, e.method, e.mean_mre, e.std_mre, evals
            ));
        }
        out
    }
}

/// Scott-Knott ranking.
///
/// Groups are ordered by mean, then recursively cut at the point maximizing
/// the between-group sum of squares. A cut is kept only when the two sides
/// differ significantly under the bootstrap test AND the A12 effect size is
/// at least 0.6 (not just a small effect). Groups in the same surviving
/// cluster share a rank; ranks are dense and ascend with the mean.
pub fn scott_knott(groups: &[(String, Vec<f64>)], seed: u64) -> Result<RankTable> {
    if groups.is_empty() {
        return Err(Error::InvalidArgument(
            "ranking needs at least one group".into(),
        ));
    }
    for (name, values) in groups {
        if values.is_empty() {
            return Err(Error::InvalidArgument(format!("group {name:?} is empty")));
        }
    }

    let mut ordered: Vec<(String, Vec<f64>)> = groups.to_vec();
    ordered.sort_by(|a, b| {
        mean(&a.1)
            .total_cmp(&mean(&b.1))
            .then_with(|| a.0.cmp(&b.0))
    });

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    split_segment(&ordered, 0, ordered.len(), seed, &mut clusters);

    let mut entries = Vec::with_capacity(ordered.len());
    for (rank0, cluster) in clusters.iter().enumerate() {
        for &gi in cluster {
            let (name, values) = &ordered[gi];
            entries.push(RankEntry {
                method: name.clone(),
                rank: rank0 + 1,
                mean_mre: mean(values),
                std_mre: pop_std(values),
                evaluations: None,
            });
        }
    }
    Ok(RankTable { entries })
}

/// Recursively cuts `ordered[lo..hi]`, appending surviving clusters
/// left-to-right.
fn split_segment(
    ordered: &[(String, Vec<f64>)],
    lo: usize,
    hi: usize,
    seed: u64,
    out: &mut Vec<Vec<usize>>,
) {
    if hi - lo == 1 {
        out.push(vec![lo]);
        return;
    }

    let concat = |a: usize, b: usize| -> Vec<f64> {
        ordered[a..b].iter().flat_map(|(_, v)| v.clone()).collect()
    };
    let all = concat(lo, hi);
    let grand_mean = mean(&all);

    let mut best: Option<(f64, usize)> = None;
    for cut in lo + 1..hi {
        let left = concat(lo, cut);
        let right = concat(cut, hi);
        let between = left.len() as f64 * (mean(&left) - grand_mean).powi(2)
            + right.len() as f64 * (mean(&right) - grand_mean).powi(2);
        if best.is_none_or(|(b, _)| between > b) {
            best = Some((between, cut));
        }
    }
    let cut = best.expect("segment has at least two groups").1;

    let left = concat(lo, cut);
    let right = concat(cut, hi);
    let test_seed = derive_seed(derive_seed(seed, lo as u64), hi as u64);
    // the right side has the larger means; demand it dominates clearly
    let significant = bootstrap_significant(
        &right,
        &left,
        SK_BOOTSTRAP_ITERATIONS,
        SK_CONFIDENCE,
        test_seed,
    )
    .expect("both sides are non-empty and iterations are fixed");
    let effect = a12(&right, &left).expect("both sides are non-empty");

    if significant && effect >= SK_SMALL_EFFECT {
        split_segment(ordered, lo, cut, seed, out);
        split_segment(ordered, cut, hi, seed, out);
    } else {
        out.push((lo..hi).collect());
    }
}
