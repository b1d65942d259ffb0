//! The `treecert` command line.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::data::{
    bundled_arizona_collision, bundled_maryland_collision, encode_dataset, export_libsvm, load_unification_maps,
    parse_libsvm, read_raw_records, split_train_test, unify_record, DataError, Dataset, LabelRule, UnificationMap,
};
use crate::model::{dump_ensemble, load_ensemble, Ensemble, ModelError};
use crate::rules::{attach_stats, extract_rules, render, simplify, RuleExport, RuleSchema, RulesError};
use crate::training::{grid_search, GridCell, Learner, Metrics, TrainError, TrainParams, DEFAULT_DEPTHS, DEFAULT_MIN_SAMPLES};
use crate::verify::{run_verification, VerifyError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Data(e.to_string())
    }
}

fn train_exit_code(e: &TrainError) -> i32 {
    match e {
        TrainError::InvalidParams(_) | TrainError::EmptyGrid => 1,
        TrainError::Empty | TrainError::NonBinary(_) => 2,
        TrainError::Cell { source, .. } => train_exit_code(source),
        TrainError::Model(_) => 3,
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        let msg = e.to_string();
        match train_exit_code(&e) {
            1 => CliError::Usage(msg),
            2 => CliError::Data(msg),
            _ => CliError::Internal(msg),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::InvalidParams(_) => CliError::Usage(e.to_string()),
            VerifyError::Model(_) | VerifyError::EmptyDataset | VerifyError::NonBinaryLabel(_) => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<RulesError> for CliError {
    fn from(e: RulesError) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "treecert", version, about = "Train, explain and certify tree classifiers on crash data")]
pub struct Cli {
    /// Experiment config (JSON); relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Main output file of the subcommand.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unify raw crash CSVs into a LIBSVM dataset.
    Unify(UnifyArgs),
    /// Grid-search a tree model and write the best one.
    Train(TrainArgs),
    /// Print the decision rules of a classifier tree.
    Rules(RulesArgs),
    /// Certify robustness radii on a dataset.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BundledMap {
    Maryland,
    Arizona,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mapping").required(true).args(["maps", "bundled"])))]
pub struct UnifyArgs {
    /// Raw CSV files with a header row.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Mapping spec (JSON list of unification maps).
    #[arg(long)]
    pub maps: Option<PathBuf>,
    /// Use a built-in collision-manner map.
    #[arg(long, value_enum)]
    pub bundled: Option<BundledMap>,
    /// Feature order and label rule.
    #[arg(long)]
    pub schema: PathBuf,
    /// Audit log path [default: next to the output, `.audit.csv`].
    #[arg(long)]
    pub audit: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset to split and train on; overrides the config `data`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Train boosted additive ensembles instead of a single CART tree.
    #[arg(long)]
    pub boosted: bool,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DEPTHS)]
    pub depths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_MIN_SAMPLES)]
    pub min_samples: Vec<usize>,
    /// Boosting rounds.
    #[arg(long)]
    pub n_rounds: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub l2_reg: Option<f64>,
    /// Grid report path [default: model path with `.grid.json`].
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the held-out split as LIBSVM.
    #[arg(long)]
    pub test_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    /// Classifier model; overrides the config `model`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Feature names and code dictionaries (JSON list).
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Label the rules conclude.
    #[arg(long, default_value_t = 1)]
    pub target: u32,
    /// Dataset for support and confidence.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub num_points: Option<usize>,
    #[arg(long)]
    pub eps_init: Option<f64>,
    #[arg(long)]
    pub max_clique: Option<usize>,
    #[arg(long)]
    pub max_search: Option<usize>,
    #[arg(long)]
    pub max_level: Option<usize>,
    #[arg(long)]
    pub dp: Option<u8>,
}

/// Column layout for `unify`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnifySchema {
    pub features: Vec<String>,
    pub label: LabelRule,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Data(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

struct Context {
    config: Config,
    base_dir: PathBuf,
    out: Option<PathBuf>,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, CliError> {
        let (mut config, base_dir) = match &cli.config {
            Some(path) => (
                Config::load(path)?,
                path.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (Config::default(), PathBuf::new()),
        };
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        Ok(Context {
            config,
            base_dir,
            out: cli.out.clone(),
        })
    }

    fn model_path(&self, flag: &Option<PathBuf>) -> Result<PathBuf, CliError> {
        flag.clone()
            .or_else(|| self.config.model.clone())
            .ok_or_else(|| CliError::Usage("no model path: pass --model or set `model` in the config".into()))
    }

    fn data_path(&self, flag: &Option<PathBuf>) -> Result<PathBuf, CliError> {
        flag.clone()
            .or_else(|| self.config.data.clone())
            .ok_or_else(|| CliError::Usage("no data path: pass --data or set `data` in the config".into()))
    }
}

fn load_model(path: &Path) -> Result<Ensemble, CliError> {
    load_ensemble(&read_text(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    parse_libsvm(&read_text(path)?, None).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn cmd_unify(ctx: &Context, args: &UnifyArgs) -> Result<(), CliError> {
    let out = ctx.out.clone().ok_or_else(|| CliError::Usage("unify needs --out".into()))?;
    let maps: Vec<UnificationMap> = match (&args.maps, args.bundled) {
        (Some(path), _) => load_unification_maps(&read_text(path)?)?,
        (None, Some(BundledMap::Maryland)) => bundled_maryland_collision(),
        (None, Some(BundledMap::Arizona)) => bundled_arizona_collision(),
        (None, None) => return Err(CliError::Usage("pass --maps or --bundled".into())),
    };
    let schema: UnifySchema = serde_json::from_str(&read_text(&args.schema)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.schema.display())))?;

    let mut unified = Vec::new();
    let mut audit = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let mut unmapped = 0usize;
    for input in &args.inputs {
        let file = File::open(input).map_err(|e| CliError::Data(format!("cannot read {}: {e}", input.display())))?;
        let records = read_raw_records(file).map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
        let name = input.display().to_string();
        for (i, rec) in records.iter().enumerate() {
            let u = unify_record(rec, &maps);
            for (column, raw) in &u.unmapped {
                log::info!("{name} row {}: unmapped {column} value `{raw}`", i + 1);
                audit
                    .write_record([name.as_str(), &(i + 1).to_string(), column, raw])
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                unmapped += 1;
            }
            unified.push(u.record);
        }
    }
    let dataset = encode_dataset(&unified, &schema.features, &schema.label)?;
    let audit = audit.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    let audit_path = args.audit.clone().unwrap_or_else(|| out.with_extension("audit.csv"));
    write_atomic(&out, export_libsvm(&dataset).as_bytes())?;
    write_atomic(&audit_path, &audit)?;
    if unmapped > 0 {
        log::warn!("{unmapped} unmapped values recorded in {}", audit_path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct GridReport<'a> {
    learner: &'static str,
    seed: u64,
    train_fraction: f64,
    train_size: usize,
    test_size: usize,
    best_max_depth: usize,
    best_min_samples_split: usize,
    best_metrics: &'a Metrics,
    cells: &'a [GridCell],
}

fn cmd_train(ctx: &Context, args: &TrainArgs) -> Result<(), CliError> {
    let data = ctx.data_path(&args.data)?;
    let model_out = ctx
        .out
        .clone()
        .or_else(|| ctx.config.model.clone())
        .ok_or_else(|| CliError::Usage("no model output: pass --out or set `model` in the config".into()))?;
    let dataset = load_dataset(&data)?;
    let (train, test) = split_train_test(&dataset, ctx.config.train_fraction, ctx.config.seed)?;
    let defaults = TrainParams::default();
    let learner = if args.boosted {
        Learner::Boosted(TrainParams {
            n_rounds: args.n_rounds.unwrap_or(defaults.n_rounds),
            learning_rate: args.learning_rate.unwrap_or(defaults.learning_rate),
            l2_reg: args.l2_reg.unwrap_or(defaults.l2_reg),
            ..defaults
        })
    } else {
        Learner::Cart
    };
    let result = grid_search(&train, &test, &args.depths, &args.min_samples, learner)?;
    let report = GridReport {
        learner: if args.boosted { "boosted" } else { "cart" },
        seed: ctx.config.seed,
        train_fraction: ctx.config.train_fraction,
        train_size: train.len(),
        test_size: test.len(),
        best_max_depth: result.best_params.max_depth,
        best_min_samples_split: result.best_params.min_samples_split,
        best_metrics: &result.best_metrics,
        cells: &result.cells,
    };
    let report_path = args.report.clone().unwrap_or_else(|| model_out.with_extension("grid.json"));
    write_atomic(&model_out, dump_ensemble(&result.best_model).as_bytes())?;
    write_atomic(&report_path, to_json(&report).as_bytes())?;
    if let Some(path) = &args.test_out {
        write_atomic(path, export_libsvm(&test).as_bytes())?;
    }
    println!(
        "best depth {} min_samples_split {}: f1 = {:.4}",
        result.best_params.max_depth, result.best_params.min_samples_split, result.best_metrics.f1
    );
    Ok(())
}

fn cmd_rules(ctx: &Context, args: &RulesArgs) -> Result<(), CliError> {
    let model = load_model(&ctx.model_path(&args.model)?)?;
    let tree = model.classifier_tree().map_err(|_| RulesError::NotClassifier)?;
    let schema = match &args.schema {
        Some(path) => Some(RuleSchema::from_json(&read_text(path)?)?),
        None => {
            log::warn!("no schema given; features are rendered by index");
            None
        }
    };
    let mut rules = extract_rules(tree, args.target)?;
    if let Some(path) = &args.data {
        attach_stats(&mut rules, tree, &load_dataset(path)?);
    }
    let codebooks = schema.as_ref().map(RuleSchema::codebooks).unwrap_or_default();
    let rules: Vec<_> = rules.iter().filter_map(|r| simplify(r, &codebooks)).collect();
    for r in &rules {
        println!("{}", render(r, schema.as_ref()));
    }
    if let Some(out) = &ctx.out {
        let export: Vec<RuleExport> = rules.iter().map(|r| RuleExport::new(r, schema.as_ref())).collect();
        write_atomic(out, to_json(&export).as_bytes())?;
    }
    Ok(())
}

fn cmd_verify(ctx: &Context, args: &VerifyArgs) -> Result<(), CliError> {
    let mut config = ctx.config.clone();
    config.num_points = args.num_points.unwrap_or(config.num_points);
    config.eps_init = args.eps_init.unwrap_or(config.eps_init);
    config.max_clique = args.max_clique.unwrap_or(config.max_clique);
    config.max_search = args.max_search.unwrap_or(config.max_search);
    config.max_level = args.max_level.unwrap_or(config.max_level);
    config.dp = args.dp.unwrap_or(config.dp);
    config.validate()?;

    let model = load_model(&ctx.model_path(&args.model)?)?;
    let dataset = load_dataset(&ctx.data_path(&args.data)?)?;
    let report = run_verification(&model, &dataset, &config.verify_params(), config.num_points)?;
    let out = ctx.out.clone().unwrap_or_else(|| ctx.base_dir.join("report.json"));
    write_atomic(&out, report.to_json().as_bytes())?;
    println!("{}", report.summary());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Unify(a) => cmd_unify(&ctx, a),
        Command::Train(a) => cmd_train(&ctx, a),
        Command::Rules(a) => cmd_rules(&ctx, a),
        Command::Verify(a) => cmd_verify(&ctx, a),
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
