//! Dataset ingestion (feature CSVs consumed post-extraction), seeded
//! synthetic dataset generation for desk-scale experiments, and report
//! writing with checksummed manifests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::evaluation::{AttackCampaignReport, SweepReport, ThresholdSweepReport};
use crate::kitnet::Label;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("data config error: {0}")]
    Config(String),
}

/// Immutable rectangular feature matrix with one label per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    rows: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl LabeledDataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<Self, DataError> {
        if rows.len() != labels.len() {
            return Err(DataError::Config(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if rows.is_empty() {
            return Err(DataError::Config("dataset must be non-empty".into()));
        }
        let width = rows[0].len();
        if width == 0 {
            return Err(DataError::Config("rows must have at least one feature".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(DataError::Config(format!(
                    "row {i} has width {}, expected {width}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(DataError::Config(format!("row {i} contains a non-finite value")));
            }
        }
        Ok(Self { rows, labels })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.rows[0].len()
    }

    pub fn label_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for l in &self.labels {
            *counts.entry(l.to_string()).or_insert(0) += 1;
        }
        counts
    }
}

fn parse_label(cell: &str, line: usize) -> Result<Label, DataError> {
    match cell.trim() {
        "0" | "benign" => Ok(Label::Benign),
        "1" | "malicious" => Ok(Label::Malicious),
        other => Err(DataError::Parse {
            line,
            msg: format!("unknown label value {other:?} (expected 0/1 or benign/malicious)"),
        }),
    }
}

/// Parsed CSV: either labeled rows or plain feature rows, depending on
/// whether a label column was requested.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedCsv {
    Labeled(LabeledDataset),
    Unlabeled(Vec<Vec<f64>>),
}

/// Loads a UTF-8 comma-separated feature file. The first line must be a
/// header; `label_column` names the header cell holding 0/1 or
/// benign/malicious labels. Line numbers in errors are 1-based.
pub fn load_feature_csv(
    path: impl AsRef<Path>,
    label_column: Option<&str>,
) -> Result<LoadedCsv, DataError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines.next().ok_or(DataError::Parse {
        line: 1,
        msg: "empty file; expected a header row".into(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let label_idx = match label_column {
        Some(name) => Some(
            columns
                .iter()
                .position(|c| *c == name)
                .ok_or_else(|| DataError::Parse {
                    line: 1,
                    msg: format!("label column {name:?} not found in header"),
                })?,
        ),
        None => None,
    };

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').collect();
        if cells.len() != columns.len() {
            return Err(DataError::Parse {
                line,
                msg: format!("expected {} cells, found {}", columns.len(), cells.len()),
            });
        }
        let mut row = Vec::with_capacity(columns.len());
        for (col, cell) in cells.iter().enumerate() {
            if Some(col) == label_idx {
                labels.push(parse_label(cell, line)?);
                continue;
            }
            let value: f64 = cell.trim().parse().map_err(|_| DataError::Parse {
                line,
                msg: format!("non-numeric cell {:?} in column {:?}", cell.trim(), columns[col]),
            })?;
            if !value.is_finite() {
                return Err(DataError::Parse {
                    line,
                    msg: format!("non-finite value in column {:?}", columns[col]),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(DataError::Parse {
            line: 1,
            msg: "file has a header but no data rows".into(),
        });
    }

    match label_idx {
        Some(_) => Ok(LoadedCsv::Labeled(LabeledDataset::new(rows, labels)?)),
        None => Ok(LoadedCsv::Unlabeled(rows)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_features: usize,
    pub n_benign: usize,
    pub n_malicious: usize,
    pub benign_center: f64,
    pub benign_spread: f64,
    /// Per-feature offset added to malicious rows.
    pub malicious_shift: Vec<f64>,
    pub seed: u64,
}

/// Benign rows are Gaussian around `benign_center`; malicious rows add the
/// per-feature `malicious_shift` on top of the same noise. Deterministic in
/// the seed.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<LabeledDataset, DataError> {
    if cfg.n_features == 0 || cfg.n_benign == 0 || cfg.n_malicious == 0 {
        return Err(DataError::Config("counts must be positive".into()));
    }
    if !(cfg.benign_spread > 0.0) {
        return Err(DataError::Config("benign_spread must be positive".into()));
    }
    if cfg.malicious_shift.len() != cfg.n_features {
        return Err(DataError::Config(format!(
            "malicious_shift has {} entries for {} features",
            cfg.malicious_shift.len(),
            cfg.n_features
        )));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, cfg.benign_spread)
        .map_err(|e| DataError::Config(e.to_string()))?;

    let mut rows = Vec::with_capacity(cfg.n_benign + cfg.n_malicious);
    let mut labels = Vec::with_capacity(cfg.n_benign + cfg.n_malicious);
    for _ in 0..cfg.n_benign {
        rows.push(
            (0..cfg.n_features)
                .map(|_| cfg.benign_center + noise.sample(&mut rng))
                .collect(),
        );
        labels.push(Label::Benign);
    }
    for _ in 0..cfg.n_malicious {
        rows.push(
            (0..cfg.n_features)
                .map(|j| cfg.benign_center + cfg.malicious_shift[j] + noise.sample(&mut rng))
                .collect(),
        );
        labels.push(Label::Malicious);
    }
    LabeledDataset::new(rows, labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    /// JSON with full precision.
    Structured,
    /// Flat plot-ready rows.
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub path: String,
    pub n_rows: usize,
    pub n_features: usize,
    pub has_labels: bool,
    pub label_counts: BTreeMap<String, usize>,
    /// SHA-256 of the file contents, hex-encoded.
    pub checksum: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn dataset_manifest(path: impl AsRef<Path>, ds: &LabeledDataset) -> Result<DatasetManifest, DataError> {
    let bytes = fs::read(path.as_ref())?;
    Ok(DatasetManifest {
        path: path.as_ref().display().to_string(),
        n_rows: ds.n_rows(),
        n_features: ds.n_features(),
        has_labels: true,
        label_counts: ds.label_counts(),
        checksum: sha256_hex(&bytes),
    })
}

/// Any report the writer knows how to serialize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    ThresholdSweep(ThresholdSweepReport),
    Campaign(AttackCampaignReport),
    Sweep(SweepReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportManifest {
    pub path: String,
    pub format: ReportFormat,
    pub checksum: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::ThresholdSweep(r) => {
            out.push_str("threshold,fpr,fnr,accuracy\n");
            for p in &r.grid {
                let _ = writeln!(out, "{},{},{},{}", p.threshold, p.fpr, p.fnr, p.accuracy);
            }
        }
        Report::Campaign(r) => {
            out.push_str("sample_index,success,iterations,l0,l1,l2,linf\n");
            for (idx, s) in r.sample_indices.iter().zip(&r.per_sample) {
                let d = s.distances.as_ref();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    idx,
                    s.success,
                    s.iterations,
                    fmt_opt(d.map(|d| d.l0)),
                    fmt_opt(d.map(|d| d.l1)),
                    fmt_opt(d.map(|d| d.l2)),
                    fmt_opt(d.map(|d| d.linf)),
                );
            }
        }
        Report::Sweep(r) => {
            let _ = writeln!(out, "{},success_rate,l0,l1,l2,linf", r.swept_parameter);
            for p in &r.points {
                let d = p.mean_distances.as_ref();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    p.value,
                    p.success_rate,
                    fmt_opt(d.map(|d| d.l0)),
                    fmt_opt(d.map(|d| d.l1)),
                    fmt_opt(d.map(|d| d.l2)),
                    fmt_opt(d.map(|d| d.linf)),
                );
            }
        }
    }
    out
}

/// Writes a report to `path` and returns a manifest with the file checksum.
/// The structured format is JSON; CSV is one row per grid point or sample.
pub fn write_report(
    report: &Report,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<ReportManifest, DataError> {
    let body = match format {
        ReportFormat::Structured => serde_json::to_string_pretty(report)
            .map_err(|e| DataError::Config(e.to_string()))?,
        ReportFormat::Csv => render_csv(report),
    };
    fs::write(path.as_ref(), &body)?;
    Ok(ReportManifest {
        path: path.as_ref().display().to_string(),
        format,
        checksum: sha256_hex(body.as_bytes()),
    })
}

/// Writes a labeled dataset as a feature CSV (`f1..fn,label`) that
/// [`load_feature_csv`] reads back with `label_column = Some("label")`.
pub fn write_dataset_csv(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    let mut body = String::new();
    for j in 1..=ds.n_features() {
        let _ = write!(body, "f{j},");
    }
    body.push_str("label\n");
    for (row, label) in ds.rows().iter().zip(ds.labels()) {
        for v in row {
            let _ = write!(body, "{v},");
        }
        let _ = writeln!(body, "{}", match label {
            Label::Benign => 0,
            Label::Malicious => 1,
        });
    }
    fs::write(path.as_ref(), body)?;
    Ok(())
}

/// ROC points as a separate plot-ready CSV (`fpr,tpr` fractions).
pub fn write_roc_csv(
    report: &ThresholdSweepReport,
    path: impl AsRef<Path>,
) -> Result<ReportManifest, DataError> {
    let mut body = String::from("fpr,tpr\n");
    for (fpr, tpr) in &report.roc {
        let _ = writeln!(body, "{fpr},{tpr}");
    }
    fs::write(path.as_ref(), &body)?;
    Ok(ReportManifest {
        path: path.as_ref().display().to_string(),
        format: ReportFormat::Csv,
        checksum: sha256_hex(body.as_bytes()),
    })
}
