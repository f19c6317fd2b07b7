//! Command-line front end.
//!
//! Subcommands mirror the pipeline stages so each one is independently
//! exercisable: `rig` runs the repeated experiment, `rank` compares error
//! samples, `train` fits a surrogate from a sampling policy, `sample` shows
//! what a policy would measure, `optimize` searches a trained surrogate, and
//! `dim` estimates the intrinsic dimension of a configuration table.
//!
//! Outputs are JSON by default (`--format text` for humans) and every
//! output embeds the seed, tool version, and an input digest so published
//! numbers can be audited. Exit codes: 0 success, 2 usage, 3 data
//! validation, 4 runtime failure.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::cart::{self, CartParams, TreeNode};
use crate::dataset::ConfigDataset;
use crate::error::{Error, Result};
use crate::eval::{self, RigSettings};
use crate::intrinsic;
use crate::optimize::{de_optimize, BitClause, DeParams, ValidityPredicate};
use crate::rng::derive_seed;
use crate::sampling::{PolicySpec, SamplePlan};
use crate::util::fnv1a64;

const TOOL: &str = "perfscout";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = TOOL, version, about = "Minimal-sampling performance prediction for configurable systems")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the repeated train-fraction experiment rig
    Rig(RigArgs),
    /// Rank per-method error samples with Scott-Knott
    Rank(RankArgs),
    /// Sample a policy, fit a regression tree, and save the model
    Train(TrainArgs),
    /// Show which rows a sampling policy would measure
    Sample(SampleArgs),
    /// Search a trained surrogate for a low-performance configuration
    Optimize(OptimizeArgs),
    /// Estimate the intrinsic dimension of a configuration table
    Dim(DimArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    S1,
    S2,
    S3,
    RandomK,
    Progressive,
    Full,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct PolicyFlags {
    /// Sampling policy
    #[arg(long, value_enum, default_value = "s1")]
    policy: PolicyArg,
    /// Sample size for the random-k policy
    #[arg(long, required_if_eq("policy", "random-k"))]
    k: Option<usize>,
    /// Rounds of n-feature steps for the progressive policy
    #[arg(long, default_value_t = 2)]
    rounds: usize,
}

impl PolicyFlags {
    fn spec(&self) -> PolicySpec {
        match self.policy {
            PolicyArg::S1 => PolicySpec::S1,
            PolicyArg::S2 => PolicySpec::S2,
            PolicyArg::S3 => PolicySpec::S3,
            PolicyArg::RandomK => PolicySpec::RandomK {
                k: self.k.expect("clap enforces --k for random-k"),
            },
            PolicyArg::Progressive => PolicySpec::Progressive2N {
                rounds: self.rounds,
            },
            PolicyArg::Full => PolicySpec::FullTrain,
        }
    }
}

#[derive(Args)]
struct CartFlags {
    /// Smallest node the tree learner may split
    #[arg(long, default_value_t = 4)]
    min_samples_split: usize,
    /// Smallest side a split may produce
    #[arg(long, default_value_t = 1)]
    min_samples_leaf: usize,
    /// Optional depth cap for the tree learner
    #[arg(long)]
    max_depth: Option<usize>,
}

impl CartFlags {
    fn params(&self) -> CartParams {
        CartParams {
            min_samples_split: self.min_samples_split,
            min_samples_leaf: self.min_samples_leaf,
            max_depth: self.max_depth,
        }
    }
}

#[derive(Args)]
struct OutputFlags {
    /// Output format for the primary result
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the primary result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RigArgs {
    /// Measured-configuration CSV table
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    policy: PolicyFlags,
    /// Train fractions to sweep, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leaf threshold multiplier for the clustering stage
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    #[command(flatten)]
    cart: CartFlags,
    /// MRE-point tolerance for the reported elbow fraction
    #[arg(long, default_value_t = 1.0)]
    elbow_tolerance: f64,
    /// Also write the (fraction, mean, std) curve as CSV
    #[arg(long)]
    curve_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct RankArgs {
    /// One file per method: its per-repeat MRE samples (JSON array or
    /// whitespace-separated numbers); the file stem names the method
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    policy: PolicyFlags,
    /// Optional train fraction; when set, the policy samples only the
    /// training side of a seeded shuffle split
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    #[command(flatten)]
    cart: CartFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    policy: PolicyFlags,
    /// Optional train fraction; when set, sampling sees only the training
    /// side of a seeded shuffle split
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    /// Dump the cluster tree (sizes, poles, projections) as JSON here
    #[arg(long)]
    dump_tree: Option<PathBuf>,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Model file produced by `train`
    #[arg(long)]
    model: PathBuf,
    /// Configuration arity; defaults to the arity stored in the model
    #[arg(long)]
    arity: Option<usize>,
    /// JSON file with validity clauses: {"clauses": [{"bit": 0, "value": true}, ...]}
    #[arg(long)]
    validity: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    population: usize,
    #[arg(long, default_value_t = 50)]
    generations: usize,
    #[arg(long, default_value_t = 0.7)]
    crossover_rate: f64,
    #[arg(long, default_value_t = 0.5)]
    differential_weight: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct DimArgs {
    #[arg(long)]
    data: PathBuf,
    /// Smallest radius of the grid; defaults to the 5th percentile of the
    /// positive pairwise distances
    #[arg(long)]
    r0: Option<f64>,
    /// Largest radius of the grid; defaults to the 95th percentile
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Also write the (r, C(r)) table as CSV
    #[arg(long)]
    curve_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputFlags,
}

/// Reproducibility header carried by every output.
#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    tool: String,
    version: String,
    seed: u64,
    input_digest: String,
    #[serde(flatten)]
    payload: T,
}

impl<T: Serialize> Envelope<T> {
    fn new(seed: u64, input_digest: String, payload: T) -> Self {
        Envelope {
            tool: TOOL.into(),
            version: VERSION.into(),
            seed,
            input_digest,
            payload,
        }
    }

    fn header_text(&self) -> String {
        format!(
            "# {} {}\n# seed: {}\n# input: {}\n",
            self.tool, self.version, self.seed, self.input_digest
        )
    }
}

/// Model file written by `train` and read by `optimize`.
#[derive(Serialize, Deserialize)]
struct ModelPayload {
    dataset: String,
    arity: usize,
    feature_names: Vec<String>,
    policy: PolicySpec,
    fraction: Option<f64>,
    training_rows: usize,
    evaluations: usize,
    tree: TreeNode,
}

/// Runs the CLI and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version through the same path; only
            // genuine usage problems exit with 2
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let (category, code) = match &e {
                Error::Io { .. }
                | Error::InvalidData(_)
                | Error::InvalidArgument(_)
                | Error::ArityMismatch { .. } => ("data", 3),
                Error::DegenerateLine
                | Error::NoValidConfiguration { .. }
                | Error::Degenerate(_) => ("runtime", 4),
            };
            eprintln!("{TOOL} error [{category}]: {e}");
            code
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Rig(args) => cmd_rig(args),
        Command::Rank(args) => cmd_rank(args),
        Command::Train(args) => cmd_train(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Dim(args) => cmd_dim(args),
    }
}

fn digest_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(fnv1a64(&bytes))
}

/// Loads a table and its digest, warning on stderr when duplicate
/// configurations were collapsed.
fn load_dataset(path: &Path) -> Result<(ConfigDataset, String)> {
    let digest = digest_file(path)?;
    let dataset = ConfigDataset::load_csv(path)?;
    if dataset.duplicates_dropped > 0 {
        eprintln!(
            "{TOOL}: warning: {} duplicate configuration(s) collapsed while loading {}",
            dataset.duplicates_dropped,
            path.display()
        );
    }
    Ok((dataset, digest))
}

fn write_result(output: &OutputFlags, json: String, text: String) -> Result<()> {
    let rendered = match output.format {
        Format::Json => json,
        Format::Text => text,
    };
    match &output.out {
        Some(path) => std::fs::write(path, rendered.as_bytes())
            .map_err(|e| Error::io(path.display().to_string(), e)),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn cmd_rig(args: RigArgs) -> Result<()> {
    let (dataset, digest) = load_dataset(&args.data)?;
    let settings = RigSettings {
        policy: args.policy.spec(),
        leaf_threshold_multiplier: args.multiplier,
        cart: args.cart.params(),
        elbow_tolerance: args.elbow_tolerance,
    };
    let report = eval::run_rig(&dataset, &settings, &args.fractions, args.repeats, args.seed)?;
    if let Some(path) = &args.curve_out {
        std::fs::write(path, report.curve_csv())
            .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    let envelope = Envelope::new(args.seed, digest, report);
    let text = format!("{}{}", envelope.header_text(), envelope.payload.to_text());
    write_result(&args.output, json_line(&envelope), text)
}

fn parse_sample_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::InvalidData(format!(
            "{}: no samples",
            path.display()
        )));
    }
    let values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| {
            Error::InvalidData(format!("{}: malformed JSON array: {e}", path.display()))
        })?
    } else {
        trimmed
            .split([',', ' ', '\t', '\n', '\r'])
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    Error::InvalidData(format!("{}: malformed number {t:?}", path.display()))
                })
            })
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(Error::InvalidData(format!(
            "{}: no samples",
            path.display()
        )));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidData(format!(
            "{}: non-finite sample {bad}",
            path.display()
        )));
    }
    Ok(values)
}

fn cmd_rank(args: RankArgs) -> Result<()> {
    let mut digest_input = Vec::new();
    let mut groups = Vec::new();
    for path in &args.files {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        digest_input.extend_from_slice(&bytes);
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        if groups.iter().any(|(n, _)| *n == name) {
            return Err(Error::InvalidData(format!(
                "duplicate method name {name:?}"
            )));
        }
        groups.push((name, parse_sample_file(path)?));
    }
    let table = eval::scott_knott(&groups, args.seed)?;
    let envelope = Envelope::new(args.seed, fnv1a64(&digest_input), table);
    let text = format!("{}{}", envelope.header_text(), envelope.payload.to_text());
    write_result(&args.output, json_line(&envelope), text)
}

fn split_train(
    dataset: &ConfigDataset,
    fraction: Option<f64>,
    seed: u64,
) -> Result<ConfigDataset> {
    match fraction {
        Some(f) => Ok(dataset.shuffle_split(f, seed)?.train),
        None => Ok(dataset.clone()),
    }
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let (dataset, digest) = load_dataset(&args.data)?;
    let train = split_train(&dataset, args.fraction, args.seed)?;
    let policy = args.policy.spec();
    let plan = policy.run(&train, args.multiplier, derive_seed(args.seed, 1))?;
    let tree = cart::fit(&plan.chosen, &args.cart.params())?;
    let payload = ModelPayload {
        dataset: dataset.name.clone(),
        arity: dataset.arity(),
        feature_names: dataset.feature_names.clone(),
        policy,
        fraction: args.fraction,
        training_rows: plan.chosen.len(),
        evaluations: plan.evaluations,
        tree,
    };
    let envelope = Envelope::new(args.seed, digest, payload);
    let text = format!(
        "{}model: {} features, {} training rows, {} evaluations, {} leaves\n",
        envelope.header_text(),
        envelope.payload.arity,
        envelope.payload.training_rows,
        envelope.payload.evaluations,
        envelope.payload.tree.leaf_count()
    );
    write_result(&args.output, json_line(&envelope), text)
}

/// What `sample` prints: the plan plus dataset row indices for each pick.
#[derive(Serialize)]
struct SamplePayload {
    dataset: String,
    policy: PolicySpec,
    fraction: Option<f64>,
    evaluations: usize,
    row_indices: Vec<usize>,
    rows: SamplePlan,
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let (dataset, digest) = load_dataset(&args.data)?;
    let train = split_train(&dataset, args.fraction, args.seed)?;
    let policy = args.policy.spec();

    if let Some(path) = &args.dump_tree {
        let params = crate::spectral::SpectralParams::new(derive_seed(derive_seed(args.seed, 1), 0))
            .with_multiplier(args.multiplier);
        let tree = crate::spectral::where_cluster(&train.rows, &params)?;
        let mut dump = tree.debug_json().to_string();
        dump.push('\n');
        std::fs::write(path, dump).map_err(|e| Error::io(path.display().to_string(), e))?;
    }

    let plan = policy.run(&train, args.multiplier, derive_seed(args.seed, 1))?;
    // configurations are unique per dataset, so bits identify the source row
    let index_of: HashMap<&[bool], usize> = dataset
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.config.bits(), i))
        .collect();
    let row_indices: Vec<usize> = plan
        .chosen
        .iter()
        .map(|r| index_of[r.config.bits()])
        .collect();
    let payload = SamplePayload {
        dataset: dataset.name.clone(),
        policy,
        fraction: args.fraction,
        evaluations: plan.evaluations,
        row_indices,
        rows: plan,
    };
    let envelope = Envelope::new(args.seed, digest, payload);
    let text = format!(
        "{}policy: {}  evaluations: {}  rows: {:?}\n",
        envelope.header_text(),
        envelope.payload.policy.label(),
        envelope.payload.evaluations,
        envelope.payload.row_indices
    );
    write_result(&args.output, json_line(&envelope), text)
}

#[derive(Deserialize)]
struct ValidityFile {
    clauses: Vec<BitClause>,
}

/// What `optimize` prints.
#[derive(Serialize)]
struct OptimizePayload {
    arity: usize,
    population: usize,
    generations: usize,
    crossover_rate: f64,
    differential_weight: f64,
    validity_clauses: usize,
    best_config: Vec<bool>,
    predicted_performance: f64,
    surrogate_calls: usize,
    history: Vec<f64>,
}

fn cmd_optimize(args: OptimizeArgs) -> Result<()> {
    let digest = digest_file(&args.model)?;
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| Error::io(args.model.display().to_string(), e))?;
    let model: Envelope<ModelPayload> = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidData(format!("malformed model file: {e}")))?;
    let arity = args.arity.unwrap_or(model.payload.arity);
    if let Some(min) = model.payload.tree.max_feature_index() {
        if arity <= min {
            return Err(Error::InvalidArgument(format!(
                "arity {arity} is too small: the model splits on feature {min}"
            )));
        }
    }

    let clauses = match &args.validity {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::io(path.display().to_string(), e))?;
            let file: ValidityFile = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidData(format!("malformed validity file: {e}")))?;
            for clause in &file.clauses {
                if clause.bit >= arity {
                    return Err(Error::InvalidArgument(format!(
                        "validity clause references bit {} but arity is {arity}",
                        clause.bit
                    )));
                }
            }
            file.clauses
        }
        None => Vec::new(),
    };
    let validity = if clauses.is_empty() {
        ValidityPredicate::always_valid()
    } else {
        ValidityPredicate::from_clauses(&clauses)
    };

    let params = DeParams {
        population: args.population,
        generations: args.generations,
        crossover_rate: args.crossover_rate,
        differential_weight: args.differential_weight,
        seed: args.seed,
    };
    let result = de_optimize(&model.payload.tree, arity, &validity, &params)?;
    let payload = OptimizePayload {
        arity,
        population: params.population,
        generations: params.generations,
        crossover_rate: params.crossover_rate,
        differential_weight: params.differential_weight,
        validity_clauses: clauses.len(),
        best_config: result.best_config.bits().to_vec(),
        predicted_performance: result.predicted_performance,
        surrogate_calls: result.surrogate_calls,
        history: result.history,
    };
    let envelope = Envelope::new(args.seed, digest, payload);
    let bits: String = envelope
        .payload
        .best_config
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    let text = format!(
        "{}best: {}  predicted: {}  surrogate calls: {}\n",
        envelope.header_text(),
        bits,
        envelope.payload.predicted_performance,
        envelope.payload.surrogate_calls
    );
    write_result(&args.output, json_line(&envelope), text)
}

/// What `dim` prints.
#[derive(Serialize)]
struct DimPayload {
    dataset: String,
    points: usize,
    r0: f64,
    rmax: f64,
    steps: usize,
    estimate: intrinsic::DimensionEstimate,
}

fn cmd_dim(args: DimArgs) -> Result<()> {
    let (dataset, digest) = load_dataset(&args.data)?;
    let configs: Vec<_> = dataset.rows.iter().map(|r| r.config.clone()).collect();
    let points = intrinsic::embed_configurations(&configs);
    let (default_r0, default_rmax) = match (args.r0, args.rmax) {
        (Some(_), Some(_)) => (0.0, 0.0), // unused
        _ => intrinsic::default_radius_range(&points)?,
    };
    let r0 = args.r0.unwrap_or(default_r0);
    let rmax = args.rmax.unwrap_or(default_rmax);
    let estimate = intrinsic::intrinsic_dimension(&points, r0, rmax, args.steps)?;
    if let Some(path) = &args.curve_out {
        std::fs::write(path, estimate.curve_csv())
            .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    let payload = DimPayload {
        dataset: dataset.name.clone(),
        points: points.len(),
        r0,
        rmax,
        steps: args.steps,
        estimate,
    };
    let envelope = Envelope::new(args.seed, digest, payload);
    let text = format!(
        "{}points: {}  radius: [{}, {}]  dimension: {:.4}\n",
        envelope.header_text(),
        envelope.payload.points,
        envelope.payload.r0,
        envelope.payload.rmax,
        envelope.payload.estimate.dimension
    );
    write_result(&args.output, json_line(&envelope), text)
}
