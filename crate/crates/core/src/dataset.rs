//! Measured-configuration tables.
//!
//! A dataset is a table with one row per valid configuration of a
//! configurable software system: a Boolean cell per option plus a measured
//! performance score. This module loads, validates, shuffles, and splits
//! those tables; every other module consumes rows from here.
//!
//! The on-disk format is plain CSV: a header of unique feature names plus a
//! final performance column, feature cells strictly `0`/`1`, performance a
//! finite positive number. Quoting is not supported, so feature names must
//! not contain commas or line breaks.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// A complete true/false assignment to every option of the system,
/// one bit per feature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    bits: Vec<bool>,
}

impl Configuration {
    pub fn new(bits: Vec<bool>) -> Self {
        Configuration { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The 0/1 embedding used for distance geometry.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// One table row: a configuration and its measured performance score.
///
/// Performance must be finite and strictly positive; relative error divides
/// by it, so zero or negative scores are rejected when rows are built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredConfig {
    pub config: Configuration,
    pub performance: f64,
}

impl MeasuredConfig {
    pub fn new(config: Configuration, performance: f64) -> Result<Self> {
        if !performance.is_finite() {
            return Err(Error::InvalidData(format!(
                "non-finite performance {performance}"
            )));
        }
        if performance <= 0.0 {
            return Err(Error::InvalidData(format!(
                "non-positive performance {performance}"
            )));
        }
        Ok(MeasuredConfig {
            config,
            performance,
        })
    }
}

/// A validated measured-configuration table.
///
/// Invariants: feature names are unique and non-empty, every row has one bit
/// per feature, no two rows share the same bit pattern (duplicates are
/// collapsed keeping the first occurrence, counted in `duplicates_dropped`),
/// and every performance score is finite and positive.
///
/// Immutable after construction; equality compares feature names and rows
/// (the label and load diagnostics are presentation-only).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigDataset {
    pub name: String,
    pub feature_names: Vec<String>,
    /// Name of the final CSV column, `performance` unless the source said otherwise.
    pub performance_label: String,
    pub rows: Vec<MeasuredConfig>,
    /// How many duplicate configurations were collapsed at construction.
    #[serde(default)]
    pub duplicates_dropped: usize,
}

impl PartialEq for ConfigDataset {
    fn eq(&self, other: &Self) -> bool {
        self.feature_names == other.feature_names && self.rows == other.rows
    }
}

impl ConfigDataset {
    /// Builds a dataset from parts, enforcing every invariant.
    ///
    /// Rows with bit patterns seen earlier are dropped (first occurrence
    /// wins) and counted, mirroring what `load_csv` does for files.
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        rows: Vec<MeasuredConfig>,
    ) -> Result<Self> {
        let name = name.into();
        if feature_names.is_empty() {
            return Err(Error::InvalidData("no feature columns".into()));
        }
        let mut seen_names = HashSet::new();
        for fname in &feature_names {
            if fname.is_empty() {
                return Err(Error::InvalidData("empty feature name".into()));
            }
            if fname.contains(',') || fname.contains('\n') || fname.contains('\r') {
                return Err(Error::InvalidData(format!(
                    "feature name {fname:?} contains a separator character"
                )));
            }
            if !seen_names.insert(fname.clone()) {
                return Err(Error::InvalidData(format!(
                    "duplicate feature name {fname:?}"
                )));
            }
        }
        let arity = feature_names.len();
        let mut kept: Vec<MeasuredConfig> = Vec::with_capacity(rows.len());
        let mut seen_bits: HashSet<Vec<bool>> = HashSet::new();
        let mut duplicates_dropped = 0;
        for (i, row) in rows.into_iter().enumerate() {
            if row.config.len() != arity {
                return Err(Error::InvalidData(format!(
                    "row {}: expected {} feature cells, got {}",
                    i + 1,
                    arity,
                    row.config.len()
                )));
            }
            if !row.performance.is_finite() {
                return Err(Error::InvalidData(format!(
                    "row {}: non-finite performance",
                    i + 1
                )));
            }
            if row.performance <= 0.0 {
                return Err(Error::InvalidData(format!(
                    "row {}: non-positive performance {}",
                    i + 1,
                    row.performance
                )));
            }
            if seen_bits.insert(row.config.bits().to_vec()) {
                kept.push(row);
            } else {
                duplicates_dropped += 1;
            }
        }
        Ok(ConfigDataset {
            name,
            feature_names,
            performance_label: "performance".into(),
            rows: kept,
            duplicates_dropped,
        })
    }

    /// Number of features (columns before the performance column).
    pub fn arity(&self) -> usize {
        self.feature_names.len()
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Loads a dataset from a CSV file.
    ///
    /// The final header cell names the performance column; all other cells
    /// are feature names. Duplicate configurations are collapsed keeping the
    /// first occurrence, with the count reported in `duplicates_dropped`.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        Self::parse_csv(&text, name)
    }

    /// Parses CSV text; `load_csv` is a thin wrapper around this.
    pub fn parse_csv(text: &str, name: impl Into<String>) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim_end)
            .filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidData("empty file".into()))?;
        let mut columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
        if columns.len() < 2 {
            return Err(Error::InvalidData(
                "header needs at least one feature column and a performance column".into(),
            ));
        }
        let performance_label = columns.pop().expect("checked non-empty");
        let arity = columns.len();

        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != arity + 1 {
                return Err(Error::InvalidData(format!(
                    "row {}: expected {} cells, got {}",
                    lineno + 1,
                    arity + 1,
                    cells.len()
                )));
            }
            let mut bits = Vec::with_capacity(arity);
            for (ci, cell) in cells[..arity].iter().enumerate() {
                match *cell {
                    "0" => bits.push(false),
                    "1" => bits.push(true),
                    other => {
                        return Err(Error::InvalidData(format!(
                            "row {}, column {:?}: feature cell must be 0 or 1, got {:?}",
                            lineno + 1,
                            columns[ci],
                            other
                        )))
                    }
                }
            }
            let perf: f64 = cells[arity].parse().map_err(|_| {
                Error::InvalidData(format!(
                    "row {}: cannot parse performance {:?}",
                    lineno + 1,
                    cells[arity]
                ))
            })?;
            if !perf.is_finite() {
                return Err(Error::InvalidData(format!(
                    "row {}: non-finite performance",
                    lineno + 1
                )));
            }
            if perf <= 0.0 {
                return Err(Error::InvalidData(format!(
                    "row {}: non-positive performance {perf}",
                    lineno + 1
                )));
            }
            rows.push(MeasuredConfig {
                config: Configuration::new(bits),
                performance: perf,
            });
        }
        if rows.is_empty() {
            return Err(Error::InvalidData("empty dataset".into()));
        }
        let mut ds = Self::new(name, columns, rows)?;
        ds.performance_label = performance_label;
        Ok(ds)
    }

    /// Renders the dataset back to the CSV format `load_csv` reads.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.feature_names.join(","));
        out.push(',');
        out.push_str(&self.performance_label);
        out.push('\n');
        for row in &self.rows {
            for &b in row.config.bits() {
                out.push(if b { '1' } else { '0' });
                out.push(',');
            }
            out.push_str(&format!("{}\n", row.performance));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string())
            .map_err(|e| Error::io(path.display().to_string(), e))
    }

    /// Splits the dataset into a shuffled train/test pair.
    ///
    /// Deterministic for a fixed seed: the row order is permuted with the
    /// seeded generator, the first `floor(fraction * n)` rows become the
    /// training side, the remainder the test side.
    pub fn shuffle_split(&self, fraction: f64, seed: u64) -> Result<SplitPair> {
        if fraction.is_nan() || fraction <= 0.0 || fraction >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "fraction must lie in (0, 1), got {fraction}"
            )));
        }
        if self.is_empty() {
            return Err(Error::InvalidData("cannot split an empty dataset".into()));
        }
        let n = self.rows.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = Rng::seed_from(seed);
        rng.shuffle(&mut order);
        // tiny guard against representation error in fraction * n
        let train_len = ((fraction * n as f64) + 1e-9).floor() as usize;
        let train_len = train_len.min(n);
        let take = |idx: &[usize]| -> Vec<MeasuredConfig> {
            idx.iter().map(|&i| self.rows[i].clone()).collect()
        };
        let train = ConfigDataset {
            name: format!("{}[train]", self.name),
            feature_names: self.feature_names.clone(),
            performance_label: self.performance_label.clone(),
            rows: take(&order[..train_len]),
            duplicates_dropped: 0,
        };
        let test = ConfigDataset {
            name: format!("{}[test]", self.name),
            feature_names: self.feature_names.clone(),
            performance_label: self.performance_label.clone(),
            rows: take(&order[train_len..]),
            duplicates_dropped: 0,
        };
        Ok(SplitPair {
            train,
            test,
            fraction,
            seed,
        })
    }
}

/// Result of `shuffle_split`: a disjoint train/test partition of the parent.
#[derive(Debug, Clone, Serialize)]
pub struct SplitPair {
    pub train: ConfigDataset,
    pub test: ConfigDataset,
    pub fraction: f64,
    pub seed: u64,
}
