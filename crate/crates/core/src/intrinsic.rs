//! Correlation (intrinsic) dimension estimation.
//!
//! The correlation sum `C(r)` is the fraction of point pairs closer than
//! `r`. On a set whose points fill a d-dimensional region, `C(r)` scales
//! like `r^d` over the resolvable radius range, so the slope of
//! `ln C(r)` against `ln r` estimates the intrinsic dimension. The estimate
//! here is the mean of the consecutive pairwise slopes over a log-spaced
//! radius grid, skipping radii that catch no pairs.
//!
//! Boolean configurations participate through their 0/1 embedding, so the
//! geometry matches the distance used by the spectral clustering.

use serde::Serialize;

use crate::dataset::Configuration;
use crate::error::{Error, Result};
use crate::util::quantile_sorted;

/// Euclidean distance between real vectors; on 0/1 vectors this equals the
/// configuration distance used everywhere else.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ArityMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Embeds configurations as 0/1 vectors for dimension analysis.
pub fn embed_configurations(configs: &[Configuration]) -> Vec<Vec<f64>> {
    configs.iter().map(Configuration::to_f64_vec).collect()
}

fn check_points(points: &[Vec<f64>]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "correlation analysis needs at least 2 points".into(),
        ));
    }
    let dim = points[0].len();
    for p in points {
        if p.len() != dim {
            return Err(Error::ArityMismatch {
                expected: dim,
                actual: p.len(),
            });
        }
    }
    Ok(())
}

fn pairwise_distances(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_points(points)?;
    let k = points.len();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            out.push(euclidean(&points[i], &points[j])?);
        }
    }
    Ok(out)
}

/// Fraction of point pairs strictly closer than `r`:
/// `2 / (k (k - 1)) * #{ (i, j) : i < j, dist(x_i, x_j) < r }`.
pub fn correlation_sum(points: &[Vec<f64>], r: f64) -> Result<f64> {
    if r.is_nan() || r <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    let distances = pairwise_distances(points)?;
    let within = distances.iter().filter(|&&d| d < r).count();
    Ok(within as f64 / distances.len() as f64)
}

/// A correlation-dimension estimate with the curve behind it.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionEstimate {
    /// Mean of the surviving pairwise slopes.
    pub dimension: f64,
    /// The log-spaced radius grid.
    pub r_values: Vec<f64>,
    /// C(r) per radius.
    pub c_values: Vec<f64>,
    /// ln C(r) per radius; `None` where C(r) = 0.
    pub log_c_values: Vec<Option<f64>>,
    /// Consecutive slopes that survived filtering.
    pub slopes: Vec<f64>,
}

impl DimensionEstimate {
    /// The `(r, C(r))` table as CSV.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("r,c\n");
        for (r, c) in self.r_values.iter().zip(&self.c_values) {
            out.push_str(&format!("{r},{c}\n"));
        }
        out
    }
}

/// Estimates the correlation dimension over a log-spaced radius grid.
///
/// Slopes whose endpoints have `C(r) = 0`, and any non-finite slope, are
/// discarded rather than treated as `ln 0`; if nothing survives the data is
/// reported as degenerate.
pub fn intrinsic_dimension(
    points: &[Vec<f64>],
    r0: f64,
    rmax: f64,
    steps: usize,
) -> Result<DimensionEstimate> {
    if r0.is_nan() || rmax.is_nan() || r0 <= 0.0 || r0 >= rmax {
        return Err(Error::InvalidArgument(format!(
            "radius range must satisfy 0 < r0 < rmax, got [{r0}, {rmax}]"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument(
            "the radius grid needs at least 2 steps".into(),
        ));
    }
    let mut distances = pairwise_distances(points)?;
    distances.sort_by(f64::total_cmp);
    let pair_count = distances.len() as f64;

    let ln_r0 = r0.ln();
    let ln_rmax = rmax.ln();
    let mut r_values = Vec::with_capacity(steps);
    let mut c_values = Vec::with_capacity(steps);
    let mut log_c_values = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = i as f64 / (steps - 1) as f64;
        let r = (ln_r0 + t * (ln_rmax - ln_r0)).exp();
        // sorted distances: pairs strictly below r
        let within = distances.partition_point(|&d| d < r);
        let c = within as f64 / pair_count;
        r_values.push(r);
        c_values.push(c);
        log_c_values.push(if c > 0.0 { Some(c.ln()) } else { None });
    }

    let mut slopes = Vec::new();
    for i in 0..steps - 1 {
        if let (Some(lc0), Some(lc1)) = (log_c_values[i], log_c_values[i + 1]) {
            let slope = (lc1 - lc0) / (r_values[i + 1].ln() - r_values[i].ln());
            if slope.is_finite() {
                slopes.push(slope);
            }
        }
    }
    if slopes.is_empty() {
        return Err(Error::Degenerate(
            "every slope of the correlation curve was discarded".into(),
        ));
    }
    let dimension = slopes.iter().sum::<f64>() / slopes.len() as f64;
    Ok(DimensionEstimate {
        dimension,
        r_values,
        c_values,
        log_c_values,
        slopes,
    })
}

/// Default radius range: the 5th and 95th percentiles of the positive
/// pairwise distances. Falls back to half the upper radius when the
/// percentiles coincide.
pub fn default_radius_range(points: &[Vec<f64>]) -> Result<(f64, f64)> {
    let mut positive: Vec<f64> = pairwise_distances(points)?
        .into_iter()
        .filter(|&d| d > 0.0)
        .collect();
    if positive.is_empty() {
        return Err(Error::Degenerate(
            "all points coincide; no positive pairwise distance".into(),
        ));
    }
    positive.sort_by(f64::total_cmp);
    let lo = quantile_sorted(&positive, 0.05);
    let hi = quantile_sorted(&positive, 0.95);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Ok((hi * 0.5, hi))
    }
}
