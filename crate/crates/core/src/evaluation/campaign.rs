//! Attack campaigns: run one attack over a selected sample set, re-verify
//! every claimed success, and aggregate success rate and mean perturbation
//! norms over the successful subset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::{
    cw_l2, enm, fgsm, jsma, AdversarialResult, AttackSpec, CwConfig, DistanceMetric, EnmConfig,
    FgsmConfig, JsmaConfig, LpDistances,
};
use crate::data::LabeledDataset;
use crate::kitnet::{classify_score, KitNetModel, Label, ThresholdCalibration};

use super::{select_samples, EvalError, SelectionStrategy, REPORT_SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum AttackMethod {
    Fgsm(FgsmConfig),
    Jsma(JsmaConfig),
    CwL2(CwConfig),
    Enm(EnmConfig),
}

impl AttackMethod {
    pub fn name(&self) -> &'static str {
        match self {
            AttackMethod::Fgsm(_) => "fgsm",
            AttackMethod::Jsma(_) => "jsma",
            AttackMethod::CwL2(_) => "cw_l2",
            AttackMethod::Enm(_) => "enm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// Malicious traffic evades detection: source malicious, target benign.
    Integrity,
    /// Benign traffic triggers alarms: source benign, target malicious.
    Availability,
}

impl Violation {
    pub fn source_class(self) -> Label {
        match self {
            Violation::Integrity => Label::Malicious,
            Violation::Availability => Label::Benign,
        }
    }

    pub fn target_label(self) -> Label {
        match self {
            Violation::Integrity => Label::Benign,
            Violation::Availability => Label::Malicious,
        }
    }

    /// Integrity samples are drawn uniformly from the malicious class;
    /// availability samples are the benign rows scoring nearest the
    /// threshold.
    pub fn default_selection(self) -> SelectionStrategy {
        match self {
            Violation::Integrity => SelectionStrategy::RandomOfClass,
            Violation::Availability => SelectionStrategy::NearestThreshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub method: AttackMethod,
    pub violation: Violation,
    pub n_samples: usize,
    pub seed: u64,
    /// Defaults to the violation's canonical strategy when absent.
    #[serde(default)]
    pub selection: Option<SelectionStrategy>,
    /// Per-feature perturbation bounds; `None` leaves the box unbounded.
    #[serde(default = "default_box")]
    pub box_bounds: Option<(f64, f64)>,
}

fn default_box() -> Option<(f64, f64)> {
    Some((0.0, 1.0))
}

impl CampaignConfig {
    pub fn new(method: AttackMethod, violation: Violation, n_samples: usize, seed: u64) -> Self {
        Self {
            method,
            violation,
            n_samples,
            seed,
            selection: None,
            box_bounds: default_box(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackCampaignReport {
    pub schema_version: u32,
    pub method: String,
    pub violation: Violation,
    pub n_samples: usize,
    /// Percentage in [0, 100].
    pub success_rate: f64,
    /// Averages over successful samples only; absent with zero successes.
    pub mean_distances: Option<LpDistances>,
    pub per_sample: Vec<AdversarialResult>,
    pub sample_indices: Vec<usize>,
    pub seed: u64,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub resolved_config: serde_json::Value,
}

fn run_one(
    model: &KitNetModel,
    x: &[f64],
    spec: &AttackSpec,
    method: &AttackMethod,
    calib: &ThresholdCalibration,
) -> Result<AdversarialResult, EvalError> {
    let result = match method {
        AttackMethod::Fgsm(cfg) => fgsm(model, x, spec, cfg, calib)?,
        AttackMethod::Jsma(cfg) => jsma(model, x, spec, cfg, calib)?,
        AttackMethod::CwL2(cfg) => cw_l2(model, x, spec, cfg, calib)?,
        AttackMethod::Enm(cfg) => enm(model, x, spec, cfg, calib)?,
    };
    // re-verify every claimed success at the campaign threshold
    if result.success {
        let adv = result
            .adversarial
            .as_ref()
            .ok_or_else(|| EvalError::Invalid("successful result without adversarial".into()))?;
        let got = classify_score(model.score(adv)?, calib);
        if got != spec.target_label {
            return Err(EvalError::Invalid(format!(
                "success failed re-verification: classified {got}, wanted {}",
                spec.target_label
            )));
        }
    }
    Ok(result)
}

pub fn run_attack_campaign(
    model: &KitNetModel,
    calib: &ThresholdCalibration,
    dataset: &LabeledDataset,
    config: &CampaignConfig,
) -> Result<AttackCampaignReport, EvalError> {
    let violation = config.violation;
    let strategy = config.selection.unwrap_or_else(|| violation.default_selection());
    let indices = select_samples(
        dataset,
        model,
        strategy,
        violation.source_class(),
        config.n_samples,
        config.seed,
        calib.threshold,
    )?;

    let dim = dataset.n_features();
    let spec = match config.box_bounds {
        Some((low, high)) => AttackSpec::unit_box(violation.target_label(), dim, DistanceMetric::L2)
            .with_box(vec![low; dim], vec![high; dim])?,
        None => AttackSpec::unbounded(violation.target_label(), dim, DistanceMetric::L2),
    };

    let per_sample: Vec<AdversarialResult> = indices
        .par_iter()
        .map(|&i| run_one(model, &dataset.rows()[i], &spec, &config.method, calib))
        .collect::<Result<_, _>>()?;

    let successes: Vec<&LpDistances> = per_sample
        .iter()
        .filter(|r| r.success)
        .filter_map(|r| r.distances.as_ref())
        .collect();
    let success_rate = 100.0 * successes.len() as f64 / config.n_samples.max(1) as f64;
    let mean_distances = mean_lp(&successes);

    Ok(AttackCampaignReport {
        schema_version: REPORT_SCHEMA_VERSION,
        method: config.method.name().to_string(),
        violation,
        n_samples: config.n_samples,
        success_rate,
        mean_distances,
        per_sample,
        sample_indices: indices,
        seed: config.seed,
        threshold: calib.threshold,
        resolved_config: serde_json::Value::Null,
    })
}

fn mean_lp(distances: &[&LpDistances]) -> Option<LpDistances> {
    if distances.is_empty() {
        return None;
    }
    let n = distances.len() as f64;
    Some(LpDistances {
        l0: distances.iter().map(|d| d.l0).sum::<f64>() / n,
        l1: distances.iter().map(|d| d.l1).sum::<f64>() / n,
        l2: distances.iter().map(|d| d.l2).sum::<f64>() / n,
        linf: distances.iter().map(|d| d.linf).sum::<f64>() / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub success_rate: f64,
    pub mean_distances: Option<LpDistances>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub swept_parameter: String,
    pub points: Vec<SweepPoint>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub resolved_config: serde_json::Value,
}

fn sweep_enm(
    model: &KitNetModel,
    calib: &ThresholdCalibration,
    dataset: &LabeledDataset,
    parameter: &str,
    values: &[f64],
    base: EnmConfig,
    violation: Violation,
    n: usize,
    seed: u64,
) -> Result<SweepReport, EvalError> {
    if values.is_empty() {
        return Err(EvalError::Invalid("sweep grid must be non-empty".into()));
    }
    let mut values = values.to_vec();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut points = Vec::with_capacity(values.len());
    for &v in &values {
        let mut cfg = base;
        match parameter {
            "c" => cfg.c = v,
            "beta_l1" => cfg.beta_l1 = v,
            other => return Err(EvalError::Invalid(format!("unknown sweep parameter {other}"))),
        }
        let campaign = CampaignConfig::new(AttackMethod::Enm(cfg), violation, n, seed);
        let report = run_attack_campaign(model, calib, dataset, &campaign)?;
        points.push(SweepPoint {
            value: v,
            success_rate: report.success_rate,
            mean_distances: report.mean_distances,
        });
    }
    Ok(SweepReport {
        schema_version: REPORT_SCHEMA_VERSION,
        swept_parameter: parameter.to_string(),
        points,
        resolved_config: serde_json::Value::Null,
    })
}

/// One integrity campaign per `c` value, every other parameter fixed.
pub fn sweep_enm_c(
    model: &KitNetModel,
    calib: &ThresholdCalibration,
    dataset: &LabeledDataset,
    c_values: &[f64],
    base: EnmConfig,
    n: usize,
    seed: u64,
) -> Result<SweepReport, EvalError> {
    sweep_enm(model, calib, dataset, "c", c_values, base, Violation::Integrity, n, seed)
}

/// One integrity campaign per `beta_l1` value, every other parameter fixed.
pub fn sweep_enm_beta(
    model: &KitNetModel,
    calib: &ThresholdCalibration,
    dataset: &LabeledDataset,
    beta_values: &[f64],
    base: EnmConfig,
    n: usize,
    seed: u64,
) -> Result<SweepReport, EvalError> {
    sweep_enm(model, calib, dataset, "beta_l1", beta_values, base, Violation::Integrity, n, seed)
}
