//! `kitbench` — reproducible experiments against the autoencoder-ensemble
//! detector: train/calibrate a model, sweep detection thresholds, run
//! seeded attack campaigns, sweep attack hyperparameters, and generate
//! synthetic datasets.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data error, 3
//! model/training/evaluation error.

mod config;
mod grid;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kitbench::data::{dataset_manifest, write_dataset_csv, write_roc_csv};
use kitbench::evaluation::{sweep_enm_beta, sweep_enm_c};
use kitbench::kitnet::{calibrate_threshold, ModelFileError};
use kitbench::{
    generate_synthetic, load_feature_csv, load_model, run_attack_campaign, save_model,
    sweep_threshold, train_online, write_report, AttackMethod, CampaignConfig, CwConfig,
    DataError, EnmConfig, EvalError, FgsmConfig, JsmaConfig, KitnetError, Label, LabeledDataset,
    LoadedCsv, Report, ReportFormat, SelectionStrategy, SyntheticConfig, ThresholdCalibration,
    TrainingConfig, Violation,
};

use config::{load_config, pick, require, ExperimentConfig};
use grid::{parse_grid, parse_shift};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Model(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Model(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Model(m) => m,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<KitnetError> for CliError {
    fn from(e: KitnetError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Model(e.to_string())
    }
}

impl From<ModelFileError> for CliError {
    fn from(e: ModelFileError) -> Self {
        CliError::Model(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "kitbench", version, about = "Anomaly-detector attack bench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the detector on a feature CSV and write a model file.
    Train(TrainArgs),
    /// Re-derive the alarm threshold of a saved model from its phi.
    Calibrate(CalibrateArgs),
    /// Threshold sweep and ROC/AUC against a labeled CSV.
    Evaluate(EvaluateArgs),
    /// Run one seeded adversarial campaign and report L_p statistics.
    Attack(AttackArgs),
    /// Sweep one elastic-net hyperparameter over a grid of campaigns.
    Sweep(SweepArgs),
    /// Generate a labeled synthetic feature CSV.
    Synth(SynthArgs),
}

#[derive(clap::Args)]
struct TrainArgs {
    /// TOML experiment config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feature CSV; with --label-column only benign rows are used.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    /// Destination model file.
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[arg(long)]
    fm_window: Option<usize>,
    #[arg(long)]
    train_window: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_cluster_size: Option<usize>,
    #[arg(long)]
    hidden_ratio: Option<f64>,
    /// Threshold multiplier: T = phi * beta (beta >= 1).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(clap::Args)]
struct CalibrateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Destination for the recalibrated model (inputs are never mutated).
    #[arg(long)]
    model_out: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(clap::Args)]
struct EvaluateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    /// Sweep grid lower bound.
    #[arg(long)]
    t_min: Option<f64>,
    /// Sweep grid upper bound.
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Report prefix: writes <out>.json, <out>.csv and <out>_roc.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodName {
    Fgsm,
    Jsma,
    Cw,
    Enm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ViolationName {
    Integrity,
    Availability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectionName {
    RandomOfClass,
    NearestThreshold,
}

#[derive(clap::Args)]
struct AttackArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long, value_enum)]
    method: Option<MethodName>,
    #[arg(long, value_enum)]
    violation: Option<ViolationName>,
    /// Sample selection; defaults to the violation's canonical strategy.
    #[arg(long, value_enum)]
    selection: Option<SelectionName>,
    /// Campaign size.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the stored alarm threshold for this campaign.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    box_low: Option<f64>,
    #[arg(long)]
    box_high: Option<f64>,
    /// Drop the perturbation box entirely.
    #[arg(long)]
    unbounded_box: bool,
    /// FGSM step size.
    #[arg(long)]
    epsilon: Option<f64>,
    /// JSMA per-feature step.
    #[arg(long)]
    theta: Option<f64>,
    /// JSMA distinct-feature budget.
    #[arg(long)]
    max_features: Option<usize>,
    /// C&W / elastic-net misclassification weight.
    #[arg(long)]
    c: Option<f64>,
    /// Elastic-net L1 weight.
    #[arg(long)]
    beta_l1: Option<f64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    binary_search_steps: Option<usize>,
    /// Campaign worker threads (default: all cores; 1 is sequential).
    #[arg(long)]
    workers: Option<usize>,
    /// Report prefix: writes <out>.json and <out>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParameter {
    C,
    Beta,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    /// Which elastic-net knob to sweep.
    #[arg(long, value_enum)]
    parameter: Option<SweepParameter>,
    /// Grid: comma list (1e-5,1e-4,1) or linear range start:stop:steps.
    #[arg(long)]
    values: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Fixed misclassification weight while beta is swept.
    #[arg(long)]
    c: Option<f64>,
    /// Fixed L1 weight while c is swept.
    #[arg(long)]
    beta_l1: Option<f64>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    confidence: Option<f64>,
    #[arg(long)]
    binary_search_steps: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    benign: Option<usize>,
    #[arg(long)]
    malicious: Option<usize>,
    #[arg(long)]
    center: Option<f64>,
    #[arg(long)]
    spread: Option<f64>,
    /// Comma-separated malicious shifts for the leading features.
    #[arg(long)]
    shift: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors; everything else is usage (1)
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

/// Loads a CSV that must carry labels.
fn load_labeled(path: &Path, label_column: &str) -> Result<LabeledDataset, CliError> {
    match load_feature_csv(path, Some(label_column))? {
        LoadedCsv::Labeled(ds) => Ok(ds),
        LoadedCsv::Unlabeled(_) => Err(CliError::Data(format!(
            "{} has no '{label_column}' column",
            path.display()
        ))),
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers) // 0 means all cores
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let data = require(args.data, file.train.data.clone(), "data")?;
    let model_out = require(args.model_out, file.train.model_out.clone(), "model-out")?;
    let label_column = args.label_column.or(file.train.label_column.clone());

    let defaults = TrainingConfig::default();
    let tc = TrainingConfig {
        fm_window: pick(args.fm_window, file.train.fm_window, defaults.fm_window),
        train_window: pick(args.train_window, file.train.train_window, defaults.train_window),
        learning_rate: pick(args.learning_rate, file.train.learning_rate, defaults.learning_rate),
        max_cluster_size: pick(
            args.max_cluster_size,
            file.train.max_cluster_size,
            defaults.max_cluster_size,
        ),
        hidden_ratio: pick(args.hidden_ratio, file.train.hidden_ratio, defaults.hidden_ratio),
        seed: pick(args.seed, file.seed, defaults.seed),
    };
    let beta = pick(args.beta, file.train.beta, 1.0);

    let rows: Vec<Vec<f64>> = match &label_column {
        Some(col) => {
            let ds = load_labeled(&data, col)?;
            ds.rows()
                .iter()
                .zip(ds.labels())
                .filter(|(_, &l)| l == Label::Benign)
                .map(|(r, _)| r.clone())
                .collect()
        }
        None => match load_feature_csv(&data, None)? {
            LoadedCsv::Unlabeled(rows) => rows,
            LoadedCsv::Labeled(ds) => ds.rows().to_vec(),
        },
    };

    let (model, trained) = train_online(&rows, &tc)?;
    let calib = calibrate_threshold(trained.phi, beta)?;
    save_model(&model, &calib, &model_out)?;

    let resolved = json!({
        "command": "train",
        "data": data.display().to_string(),
        "label_column": label_column,
        "model_out": model_out.display().to_string(),
        "fm_window": tc.fm_window,
        "train_window": tc.train_window,
        "learning_rate": tc.learning_rate,
        "max_cluster_size": tc.max_cluster_size,
        "hidden_ratio": tc.hidden_ratio,
        "seed": tc.seed,
        "beta": beta,
    });
    let checksum = kitbench::data::sha256_hex(
        &std::fs::read(&model_out).map_err(|e| CliError::Model(e.to_string()))?,
    );
    let summary = json!({
        "resolved_config": resolved,
        "rows": rows.len(),
        "features": rows.first().map(|r| r.len()).unwrap_or(0),
        "ensemble_autoencoders": model.ensemble().len(),
        "phi": calib.phi,
        "threshold": calib.threshold,
        "model_checksum": checksum,
    });
    let meta_path = meta_path(&model_out);
    std::fs::write(&meta_path, format!("{summary:#}"))
        .map_err(|e| CliError::Model(e.to_string()))?;
    println!("{summary:#}");
    Ok(())
}

fn meta_path(model_out: &Path) -> PathBuf {
    let mut name = model_out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    model_out.with_file_name(name)
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let model_path = require(args.model, file.calibrate.model.clone(), "model")?;
    let model_out = require(args.model_out, file.calibrate.model_out.clone(), "model-out")?;
    let beta = pick(args.beta, file.calibrate.beta, 1.0);

    let (model, old) = load_model(&model_path)?;
    let calib = calibrate_threshold(old.phi, beta)?;
    save_model(&model, &calib, &model_out)?;
    println!(
        "{:#}",
        json!({
            "resolved_config": {
                "command": "calibrate",
                "model": model_path.display().to_string(),
                "model_out": model_out.display().to_string(),
                "beta": beta,
            },
            "phi": calib.phi,
            "old_threshold": old.threshold,
            "threshold": calib.threshold,
        })
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let model_path = require(args.model, file.evaluate.model.clone(), "model")?;
    let data = require(args.data, file.evaluate.data.clone(), "data")?;
    let label_column = pick(args.label_column, file.evaluate.label_column.clone(), "label".into());
    let t_min = pick(args.t_min, file.evaluate.t_min, 0.0);
    let t_max = pick(args.t_max, file.evaluate.t_max, 20.0);
    let steps = pick(args.steps, file.evaluate.steps, 401);
    let out = args.out.or(file.evaluate.out.clone());

    let (model, calib) = load_model(&model_path)?;
    let ds = load_labeled(&data, &label_column)?;
    let mut report = sweep_threshold(&model, &ds, t_min, t_max, steps)?;
    report.resolved_config = json!({
        "command": "evaluate",
        "model": model_path.display().to_string(),
        "data": data.display().to_string(),
        "label_column": label_column,
        "t_min": t_min,
        "t_max": t_max,
        "steps": steps,
        "dataset": dataset_manifest(&data, &ds)?,
    });

    println!(
        "{:#}",
        json!({
            "auc": report.auc,
            "calibrated_threshold": calib.threshold,
            "grid_points": report.grid.len(),
        })
    );
    if let Some(prefix) = out {
        let report = Report::ThresholdSweep(report);
        let m1 = write_report(&report, with_suffix(&prefix, ".json"), ReportFormat::Structured)?;
        let m2 = write_report(&report, with_suffix(&prefix, ".csv"), ReportFormat::Csv)?;
        let Report::ThresholdSweep(inner) = &report else { unreachable!() };
        let m3 = write_roc_csv(inner, with_suffix(&prefix, "_roc.csv"))?;
        println!("{:#}", json!({ "reports": [m1, m2, m3] }));
    }
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    prefix.with_file_name(name)
}

#[allow(clippy::too_many_arguments)]
fn build_method(args: &AttackArgs, file: &ExperimentConfig) -> Result<AttackMethod, CliError> {
    let section = &file.attack;
    let name = match (args.method, section.method.as_deref()) {
        (Some(m), _) => m,
        (None, Some(s)) => parse_method(s)?,
        (None, None) => return Err(CliError::Usage("missing required value --method".into())),
    };
    Ok(match name {
        MethodName::Fgsm => AttackMethod::Fgsm(FgsmConfig {
            epsilon: pick(args.epsilon, section.epsilon, FgsmConfig::default().epsilon),
        }),
        MethodName::Jsma => {
            let d = JsmaConfig::default();
            AttackMethod::Jsma(JsmaConfig {
                theta: pick(args.theta, section.theta, d.theta),
                max_features: pick(args.max_features, section.max_features, d.max_features),
            })
        }
        MethodName::Cw => {
            let d = CwConfig::default();
            AttackMethod::CwL2(CwConfig {
                c: pick(args.c, section.c, d.c),
                learning_rate: pick(args.learning_rate, section.learning_rate, d.learning_rate),
                max_steps: pick(args.max_steps, section.max_steps, d.max_steps),
                confidence: pick(args.confidence, section.confidence, d.confidence),
                binary_search_steps: pick(
                    args.binary_search_steps,
                    section.binary_search_steps,
                    d.binary_search_steps,
                ),
            })
        }
        MethodName::Enm => {
            let d = EnmConfig::default();
            AttackMethod::Enm(EnmConfig {
                c: pick(args.c, section.c, d.c),
                beta_l1: pick(args.beta_l1, section.beta_l1, d.beta_l1),
                learning_rate: pick(args.learning_rate, section.learning_rate, d.learning_rate),
                max_steps: pick(args.max_steps, section.max_steps, d.max_steps),
                confidence: pick(args.confidence, section.confidence, d.confidence),
                binary_search_steps: pick(
                    args.binary_search_steps,
                    section.binary_search_steps,
                    d.binary_search_steps,
                ),
                l2_squared: d.l2_squared,
            })
        }
    })
}

fn parse_method(s: &str) -> Result<MethodName, CliError> {
    MethodName::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown method {s}")))
}

fn cmd_attack(args: AttackArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let model_path = require(args.model.clone(), file.attack.model.clone(), "model")?;
    let data = require(args.data.clone(), file.attack.data.clone(), "data")?;
    let label_column = pick(
        args.label_column.clone(),
        file.attack.label_column.clone(),
        "label".into(),
    );
    let method = build_method(&args, &file)?;

    let violation = match (args.violation, file.attack.violation.as_deref()) {
        (Some(ViolationName::Integrity), _) => Violation::Integrity,
        (Some(ViolationName::Availability), _) => Violation::Availability,
        (None, Some("integrity")) => Violation::Integrity,
        (None, Some("availability")) => Violation::Availability,
        (None, Some(other)) => {
            return Err(CliError::Usage(format!("unknown violation {other}")))
        }
        (None, None) => Violation::Integrity,
    };
    let selection = match (args.selection, file.attack.selection.as_deref()) {
        (Some(SelectionName::RandomOfClass), _) => Some(SelectionStrategy::RandomOfClass),
        (Some(SelectionName::NearestThreshold), _) => Some(SelectionStrategy::NearestThreshold),
        (None, Some("random-of-class")) => Some(SelectionStrategy::RandomOfClass),
        (None, Some("nearest-threshold")) => Some(SelectionStrategy::NearestThreshold),
        (None, Some(other)) => {
            return Err(CliError::Usage(format!("unknown selection {other}")))
        }
        (None, None) => None,
    };
    let n = pick(args.n, file.attack.n, 100);
    let seed = pick(args.seed, file.seed, 0);
    let workers = pick(args.workers, file.workers, 0);
    let threshold = args.threshold.or(file.attack.threshold);
    let unbounded = args.unbounded_box || file.attack.unbounded_box.unwrap_or(false);
    let box_bounds = if unbounded {
        None
    } else {
        Some((
            pick(args.box_low, file.attack.box_low, 0.0),
            pick(args.box_high, file.attack.box_high, 1.0),
        ))
    };
    let out = args.out.clone().or(file.attack.out.clone());

    let (model, stored) = load_model(&model_path)?;
    let calib = match threshold {
        Some(t) => ThresholdCalibration::from_threshold(t),
        None => stored,
    };
    let ds = load_labeled(&data, &label_column)?;

    let mut campaign = CampaignConfig::new(method, violation, n, seed);
    campaign.selection = selection;
    campaign.box_bounds = box_bounds;

    let pool = thread_pool(workers)?;
    let mut report = pool.install(|| run_attack_campaign(&model, &calib, &ds, &campaign))?;
    report.resolved_config = json!({
        "command": "attack",
        "model": model_path.display().to_string(),
        "data": data.display().to_string(),
        "label_column": label_column,
        "campaign": campaign,
        "threshold": calib.threshold,
        "workers": workers,
        "dataset": dataset_manifest(&data, &ds)?,
    });

    println!(
        "{:#}",
        json!({
            "method": report.method,
            "violation": report.violation,
            "success_rate": report.success_rate,
            "mean_distances": report.mean_distances,
            "threshold": report.threshold,
            "n_samples": report.n_samples,
            "seed": report.seed,
        })
    );
    if let Some(prefix) = out {
        let report = Report::Campaign(report);
        let m1 = write_report(&report, with_suffix(&prefix, ".json"), ReportFormat::Structured)?;
        let m2 = write_report(&report, with_suffix(&prefix, ".csv"), ReportFormat::Csv)?;
        println!("{:#}", json!({ "reports": [m1, m2] }));
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let model_path = require(args.model, file.sweep.model.clone(), "model")?;
    let data = require(args.data, file.sweep.data.clone(), "data")?;
    let label_column = pick(args.label_column, file.sweep.label_column.clone(), "label".into());
    let parameter = match (args.parameter, file.sweep.parameter.as_deref()) {
        (Some(p), _) => p,
        (None, Some("c")) => SweepParameter::C,
        (None, Some("beta")) => SweepParameter::Beta,
        (None, Some(other)) => {
            return Err(CliError::Usage(format!("unknown sweep parameter {other}")))
        }
        (None, None) => return Err(CliError::Usage("missing required value --parameter".into())),
    };
    let values_expr = require(args.values, file.sweep.values.clone(), "values")?;
    let values = parse_grid(&values_expr)?;
    let n = pick(args.n, file.sweep.n, 100);
    let seed = pick(args.seed, file.seed, 0);
    let workers = pick(args.workers, file.workers, 0);
    let out = args.out.or(file.sweep.out.clone());

    let d = EnmConfig::default();
    let base = EnmConfig {
        c: pick(args.c, file.sweep.c, d.c),
        beta_l1: pick(args.beta_l1, file.sweep.beta_l1, d.beta_l1),
        learning_rate: pick(args.learning_rate, file.sweep.learning_rate, d.learning_rate),
        max_steps: pick(args.max_steps, file.sweep.max_steps, d.max_steps),
        confidence: pick(args.confidence, file.sweep.confidence, d.confidence),
        binary_search_steps: pick(
            args.binary_search_steps,
            file.sweep.binary_search_steps,
            d.binary_search_steps,
        ),
        l2_squared: d.l2_squared,
    };

    let (model, stored) = load_model(&model_path)?;
    let calib = match args.threshold.or(file.sweep.threshold) {
        Some(t) => ThresholdCalibration::from_threshold(t),
        None => stored,
    };
    let ds = load_labeled(&data, &label_column)?;

    let pool = thread_pool(workers)?;
    let mut report = pool.install(|| match parameter {
        SweepParameter::C => sweep_enm_c(&model, &calib, &ds, &values, base, n, seed),
        SweepParameter::Beta => sweep_enm_beta(&model, &calib, &ds, &values, base, n, seed),
    })?;
    report.resolved_config = json!({
        "command": "sweep",
        "model": model_path.display().to_string(),
        "data": data.display().to_string(),
        "label_column": label_column,
        "parameter": report.swept_parameter,
        "values": values,
        "base": base,
        "n": n,
        "seed": seed,
        "threshold": calib.threshold,
        "workers": workers,
        "dataset": dataset_manifest(&data, &ds)?,
    });

    for p in &report.points {
        println!(
            "{:#}",
            json!({
                "value": p.value,
                "success_rate": p.success_rate,
                "mean_distances": p.mean_distances,
            })
        );
    }
    if let Some(prefix) = out {
        let report = Report::Sweep(report);
        let m1 = write_report(&report, with_suffix(&prefix, ".json"), ReportFormat::Structured)?;
        let m2 = write_report(&report, with_suffix(&prefix, ".csv"), ReportFormat::Csv)?;
        println!("{:#}", json!({ "reports": [m1, m2] }));
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let file = load_config(args.config.as_deref())?;
    let out = require(args.out, file.synth.out.clone(), "out")?;
    let n_features = pick(args.features, file.synth.features, 20);
    let shift_expr = pick(args.shift, file.synth.shift.clone(), "0.35,0.35,0.35".into());
    let cfg = SyntheticConfig {
        n_features,
        n_benign: pick(args.benign, file.synth.benign, 1000),
        n_malicious: pick(args.malicious, file.synth.malicious, 100),
        benign_center: pick(args.center, file.synth.center, 0.5),
        benign_spread: pick(args.spread, file.synth.spread, 0.05),
        malicious_shift: parse_shift(&shift_expr, n_features)?,
        seed: pick(args.seed, file.seed, 0),
    };
    let ds = generate_synthetic(&cfg)?;
    write_dataset_csv(&ds, &out)?;
    println!(
        "{:#}",
        json!({
            "resolved_config": { "command": "synth", "out": out.display().to_string(), "config": cfg },
            "dataset": dataset_manifest(&out, &ds)?,
        })
    );
    Ok(())
}
