//! Python bindings for the perfscout pipeline.
//!
//! Exposes the dataset container, sampling policies, the tree learner, the
//! experiment rig, the statistics toolkit, the surrogate optimizer, and the
//! correlation-dimension estimator as one extension module:
//!
//!     import perfscout_py as ps
//!     ds = ps.Dataset.load_csv("apache.csv")
//!     report = ps.run_rig(ds, policy="s1", fractions=[0.4], repeats=20, seed=1)

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use perfscout::cart::{self, CartParams, TreeNode};
use perfscout::dataset::{ConfigDataset, Configuration, MeasuredConfig};
use perfscout::error::Error;
use perfscout::eval;
use perfscout::intrinsic;
use perfscout::optimize::{BitClause, DeParams, ValidityPredicate};
use perfscout::rng::derive_seed;
use perfscout::sampling::PolicySpec;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_policy(policy: &str, k: Option<usize>, rounds: usize) -> PyResult<PolicySpec> {
    match policy {
        "s1" => Ok(PolicySpec::S1),
        "s2" => Ok(PolicySpec::S2),
        "s3" => Ok(PolicySpec::S3),
        "random_k" => {
            let k = k.ok_or_else(|| PyValueError::new_err("random_k needs k"))?;
            Ok(PolicySpec::RandomK { k })
        }
        "progressive" => Ok(PolicySpec::Progressive2N { rounds }),
        "full" => Ok(PolicySpec::FullTrain),
        other => Err(PyValueError::new_err(format!(
            "unknown policy {other:?}; expected s1, s2, s3, random_k, progressive, or full"
        ))),
    }
}

/// A measured-configuration table.
#[pyclass(module = "perfscout_py", skip_from_py_object)]
#[derive(Clone)]
struct Dataset {
    inner: ConfigDataset,
}

#[pymethods]
impl Dataset {
    /// Load a table from CSV (feature columns of 0/1 plus a final
    /// performance column).
    #[staticmethod]
    fn load_csv(path: &str) -> PyResult<Self> {
        Ok(Dataset {
            inner: ConfigDataset::load_csv(path).map_err(to_py_err)?,
        })
    }

    /// Build a table from rows of (bits, performance).
    #[staticmethod]
    #[pyo3(signature = (feature_names, rows, name="dataset"))]
    fn from_rows(
        feature_names: Vec<String>,
        rows: Vec<(Vec<bool>, f64)>,
        name: &str,
    ) -> PyResult<Self> {
        let rows = rows
            .into_iter()
            .map(|(bits, perf)| MeasuredConfig::new(Configuration::new(bits), perf))
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py_err)?;
        Ok(Dataset {
            inner: ConfigDataset::new(name, feature_names, rows).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names.clone()
    }

    #[getter]
    fn arity(&self) -> usize {
        self.inner.arity()
    }

    #[getter]
    fn duplicates_dropped(&self) -> usize {
        self.inner.duplicates_dropped
    }

    fn rows(&self) -> Vec<(Vec<bool>, f64)> {
        self.inner
            .rows
            .iter()
            .map(|r| (r.config.bits().to_vec(), r.performance))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Deterministic shuffle split into (train, test).
    fn shuffle_split(&self, fraction: f64, seed: u64) -> PyResult<(Dataset, Dataset)> {
        let pair = self.inner.shuffle_split(fraction, seed).map_err(to_py_err)?;
        Ok((Dataset { inner: pair.train }, Dataset { inner: pair.test }))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv_string()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(name={:?}, features={}, rows={})",
            self.inner.name,
            self.inner.arity(),
            self.inner.len()
        )
    }
}

/// A fitted regression-tree surrogate.
#[pyclass(module = "perfscout_py", skip_from_py_object)]
#[derive(Clone)]
struct Model {
    tree: TreeNode,
    arity: usize,
}

#[pymethods]
impl Model {
    fn predict(&self, bits: Vec<bool>) -> PyResult<f64> {
        cart::predict(&self.tree, &Configuration::new(bits)).map_err(to_py_err)
    }

    #[getter]
    fn arity(&self) -> usize {
        self.arity
    }

    fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.tree).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str, arity: usize) -> PyResult<Self> {
        let tree: TreeNode =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Model { tree, arity })
    }

    fn __repr__(&self) -> String {
        format!("Model(arity={}, leaves={})", self.arity, self.tree.leaf_count())
    }
}

/// Fit a regression tree to every row of the dataset.
#[pyfunction]
#[pyo3(signature = (dataset, min_samples_split=4, min_samples_leaf=1, max_depth=None))]
fn fit_cart(
    dataset: &Dataset,
    min_samples_split: usize,
    min_samples_leaf: usize,
    max_depth: Option<usize>,
) -> PyResult<Model> {
    let params = CartParams {
        min_samples_split,
        min_samples_leaf,
        max_depth,
    };
    let tree = cart::fit(&dataset.inner.rows, &params).map_err(to_py_err)?;
    Ok(Model {
        tree,
        arity: dataset.inner.arity(),
    })
}

/// Run a sampling policy and return (row_indices, evaluations).
///
/// Indices refer to the dataset's row order. The clustering stages derive
/// their own streams from `seed`.
#[pyfunction]
#[pyo3(signature = (dataset, policy="s1", seed=0, multiplier=1.0, k=None, rounds=2))]
fn sample(
    dataset: &Dataset,
    policy: &str,
    seed: u64,
    multiplier: f64,
    k: Option<usize>,
    rounds: usize,
) -> PyResult<(Vec<usize>, usize)> {
    let spec = parse_policy(policy, k, rounds)?;
    let plan = spec
        .run(&dataset.inner, multiplier, derive_seed(seed, 1))
        .map_err(to_py_err)?;
    let indices = plan
        .chosen
        .iter()
        .map(|chosen| {
            dataset
                .inner
                .rows
                .iter()
                .position(|r| r.config == chosen.config)
                .expect("chosen rows come from the dataset")
        })
        .collect();
    Ok((indices, plan.evaluations))
}

/// Policy-sample the dataset (optionally a split of it) and fit a tree.
#[pyfunction]
#[pyo3(signature = (dataset, policy="s1", fraction=None, seed=0, multiplier=1.0,
                    min_samples_split=4, min_samples_leaf=1, max_depth=None))]
#[allow(clippy::too_many_arguments)]
fn train(
    dataset: &Dataset,
    policy: &str,
    fraction: Option<f64>,
    seed: u64,
    multiplier: f64,
    min_samples_split: usize,
    min_samples_leaf: usize,
    max_depth: Option<usize>,
) -> PyResult<Model> {
    let spec = parse_policy(policy, None, 2)?;
    let train = match fraction {
        Some(f) => dataset.inner.shuffle_split(f, seed).map_err(to_py_err)?.train,
        None => dataset.inner.clone(),
    };
    let plan = spec
        .run(&train, multiplier, derive_seed(seed, 1))
        .map_err(to_py_err)?;
    let params = CartParams {
        min_samples_split,
        min_samples_leaf,
        max_depth,
    };
    let tree = cart::fit(&plan.chosen, &params).map_err(to_py_err)?;
    Ok(Model {
        tree,
        arity: dataset.inner.arity(),
    })
}

/// Run the repeated train-fraction rig; returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (dataset, policy="s1", fractions=vec![0.4], repeats=20, seed=0,
                    multiplier=1.0, k=None, rounds=2,
                    min_samples_split=4, min_samples_leaf=1, max_depth=None,
                    elbow_tolerance=1.0))]
#[allow(clippy::too_many_arguments)]
fn run_rig(
    dataset: &Dataset,
    policy: &str,
    fractions: Vec<f64>,
    repeats: usize,
    seed: u64,
    multiplier: f64,
    k: Option<usize>,
    rounds: usize,
    min_samples_split: usize,
    min_samples_leaf: usize,
    max_depth: Option<usize>,
    elbow_tolerance: f64,
) -> PyResult<String> {
    let settings = eval::RigSettings {
        policy: parse_policy(policy, k, rounds)?,
        leaf_threshold_multiplier: multiplier,
        cart: CartParams {
            min_samples_split,
            min_samples_leaf,
            max_depth,
        },
        elbow_tolerance,
    };
    let report =
        eval::run_rig(&dataset.inner, &settings, &fractions, repeats, seed).map_err(to_py_err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Magnitude of relative error in percent.
#[pyfunction]
fn mre(predicted: f64, actual: f64) -> PyResult<f64> {
    eval::mre(predicted, actual).map_err(to_py_err)
}

/// Vargha-Delaney effect size.
#[pyfunction]
fn a12(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    eval::a12(&xs, &ys).map_err(to_py_err)
}

/// Pooled bootstrap test for a significant mean difference.
#[pyfunction]
#[pyo3(signature = (xs, ys, iterations=1000, confidence=0.95, seed=0))]
fn bootstrap_significant(
    xs: Vec<f64>,
    ys: Vec<f64>,
    iterations: usize,
    confidence: f64,
    seed: u64,
) -> PyResult<bool> {
    eval::bootstrap_significant(&xs, &ys, iterations, confidence, seed).map_err(to_py_err)
}

/// Scott-Knott ranking; returns [(method, rank, mean, std), ...].
#[pyfunction]
#[pyo3(signature = (groups, seed=0))]
fn scott_knott(groups: Vec<(String, Vec<f64>)>, seed: u64) -> PyResult<Vec<(String, usize, f64, f64)>> {
    let table = eval::scott_knott(&groups, seed).map_err(to_py_err)?;
    Ok(table
        .entries
        .into_iter()
        .map(|e| (e.method, e.rank, e.mean_mre, e.std_mre))
        .collect())
}

/// Differential-evolution search over a fitted model.
///
/// Returns (best_bits, predicted_performance, surrogate_calls, history).
/// `clauses` is an optional list of (bit, value) pairs that every candidate
/// must satisfy.
#[pyfunction]
#[pyo3(signature = (model, arity=None, clauses=None, population=30, generations=50,
                    crossover_rate=0.7, differential_weight=0.5, seed=0))]
#[allow(clippy::too_many_arguments)]
fn de_optimize(
    model: &Model,
    arity: Option<usize>,
    clauses: Option<Vec<(usize, bool)>>,
    population: usize,
    generations: usize,
    crossover_rate: f64,
    differential_weight: f64,
    seed: u64,
) -> PyResult<(Vec<bool>, f64, usize, Vec<f64>)> {
    let arity = arity.unwrap_or(model.arity);
    let validity = match clauses {
        Some(cs) if !cs.is_empty() => {
            let clauses: Vec<BitClause> = cs
                .into_iter()
                .map(|(bit, value)| BitClause { bit, value })
                .collect();
            ValidityPredicate::from_clauses(&clauses)
        }
        _ => ValidityPredicate::always_valid(),
    };
    let params = DeParams {
        population,
        generations,
        crossover_rate,
        differential_weight,
        seed,
    };
    let result =
        perfscout::optimize::de_optimize(&model.tree, arity, &validity, &params).map_err(to_py_err)?;
    Ok((
        result.best_config.bits().to_vec(),
        result.predicted_performance,
        result.surrogate_calls,
        result.history,
    ))
}

/// Fraction of point pairs strictly closer than r.
#[pyfunction]
fn correlation_sum(points: Vec<Vec<f64>>, r: f64) -> PyResult<f64> {
    intrinsic::correlation_sum(&points, r).map_err(to_py_err)
}

/// Correlation-dimension estimate of a real-vector point set.
///
/// Returns (dimension, r_values, c_values). The radius range defaults to
/// the 5th/95th percentiles of the positive pairwise distances.
#[pyfunction]
#[pyo3(signature = (points, r0=None, rmax=None, steps=20))]
fn intrinsic_dimension(
    points: Vec<Vec<f64>>,
    r0: Option<f64>,
    rmax: Option<f64>,
    steps: usize,
) -> PyResult<(f64, Vec<f64>, Vec<f64>)> {
    let (d0, dmax) = match (r0, rmax) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            let (a, b) = intrinsic::default_radius_range(&points).map_err(to_py_err)?;
            (r0.unwrap_or(a), rmax.unwrap_or(b))
        }
    };
    let est = intrinsic::intrinsic_dimension(&points, d0, dmax, steps).map_err(to_py_err)?;
    Ok((est.dimension, est.r_values, est.c_values))
}

/// Correlation dimension of a dataset's configuration bits (0/1 embedding).
#[pyfunction]
#[pyo3(signature = (dataset, r0=None, rmax=None, steps=20))]
fn dataset_dimension(
    dataset: &Dataset,
    r0: Option<f64>,
    rmax: Option<f64>,
    steps: usize,
) -> PyResult<(f64, Vec<f64>, Vec<f64>)> {
    let configs: Vec<Configuration> =
        dataset.inner.rows.iter().map(|r| r.config.clone()).collect();
    let points = intrinsic::embed_configurations(&configs);
    intrinsic_dimension(points, r0, rmax, steps)
}

#[pymodule]
fn perfscout_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(fit_cart, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(run_rig, m)?)?;
    m.add_function(wrap_pyfunction!(mre, m)?)?;
    m.add_function(wrap_pyfunction!(a12, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap_significant, m)?)?;
    m.add_function(wrap_pyfunction!(scott_knott, m)?)?;
    m.add_function(wrap_pyfunction!(de_optimize, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_sum, m)?)?;
    m.add_function(wrap_pyfunction!(intrinsic_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(dataset_dimension, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
