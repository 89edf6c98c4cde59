//! Versioned text persistence for trained models.
//!
//! The file is UTF-8 with fixed section order: header, input normalizer,
//! feature map, ensemble autoencoders, score normalizer, output autoencoder,
//! calibration. Floats are written with Rust's shortest round-trippable
//! representation, so a save/load cycle reproduces scores bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::nn::{Activation, Autoencoder, DenseLayer};

use super::{FeatureMap, KitNetModel, MinMaxNormalizer, ThresholdCalibration};

pub const MODEL_FORMAT_VERSION: &str = "kitbench-model v1";

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported model format version: {found}")]
    Version { found: String },
    #[error("malformed model file at line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

pub fn save_model(
    model: &KitNetModel,
    calib: &ThresholdCalibration,
    path: &Path,
) -> Result<(), ModelFileError> {
    fs::write(path, render_model(model, calib))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(KitNetModel, ThresholdCalibration), ModelFileError> {
    parse_model(&fs::read_to_string(path)?)
}

pub fn render_model(model: &KitNetModel, calib: &ThresholdCalibration) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_FORMAT_VERSION}");
    let _ = writeln!(
        out,
        "n={} m={} hidden_ratio={}",
        model.input_dim(),
        model.feature_map().max_cluster_size(),
        model.hidden_ratio()
    );
    let _ = writeln!(out, "[input_normalizer]");
    push_row(&mut out, model.input_normalizer().mins());
    push_row(&mut out, model.input_normalizer().maxs());
    let _ = writeln!(out, "[feature_map]");
    for cluster in model.feature_map().clusters() {
        let line: Vec<String> = cluster.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    let _ = writeln!(out, "[ensemble]");
    for ae in model.ensemble() {
        push_autoencoder(&mut out, ae);
    }
    let _ = writeln!(out, "[score_normalizer]");
    push_row(&mut out, model.score_normalizer().mins());
    push_row(&mut out, model.score_normalizer().maxs());
    let _ = writeln!(out, "[output_autoencoder]");
    push_autoencoder(&mut out, model.output_ae());
    let _ = writeln!(out, "[calibration]");
    let _ = writeln!(out, "phi={} beta_threshold={}", calib.phi, calib.beta_threshold);
    out
}

fn push_row(out: &mut String, row: &[f64]) {
    let cells: Vec<String> = row.iter().map(f64::to_string).collect();
    let _ = writeln!(out, "{}", cells.join(","));
}

fn push_autoencoder(out: &mut String, ae: &Autoencoder) {
    let _ = writeln!(out, "[autoencoder {} {}]", ae.input_dim(), ae.hidden_dim());
    for layer in [ae.encoder(), ae.decoder()] {
        for r in 0..layer.out_dim() {
            push_row(out, &layer.weights()[r * layer.in_dim()..(r + 1) * layer.in_dim()]);
        }
        push_row(out, layer.biases());
    }
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self, expect: &str) -> Result<(usize, &'a str), ModelFileError> {
        match self.iter.next() {
            Some((idx, line)) => Ok((idx + 1, line)),
            None => Err(ModelFileError::Malformed {
                line: 0,
                msg: format!("file truncated, expected {expect}"),
            }),
        }
    }
}

fn malformed(line: usize, msg: impl Into<String>) -> ModelFileError {
    ModelFileError::Malformed {
        line,
        msg: msg.into(),
    }
}

fn parse_model(text: &str) -> Result<(KitNetModel, ThresholdCalibration), ModelFileError> {
    let mut lines = Lines {
        iter: text.lines().enumerate(),
    };

    let (no, version) = lines.next("version header")?;
    if version.trim() != MODEL_FORMAT_VERSION {
        return Err(ModelFileError::Version {
            found: version.trim().to_string(),
        });
    }
    let _ = no;

    let (no, header) = lines.next("model header")?;
    let mut n = None;
    let mut m = None;
    let mut hidden_ratio = None;
    for token in header.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| malformed(no, format!("bad header token {token}")))?;
        match key {
            "n" => n = Some(parse_num::<usize>(no, value)?),
            "m" => m = Some(parse_num::<usize>(no, value)?),
            "hidden_ratio" => hidden_ratio = Some(parse_num::<f64>(no, value)?),
            other => return Err(malformed(no, format!("unknown header key {other}"))),
        }
    }
    let n = n.ok_or_else(|| malformed(no, "missing n"))?;
    let m = m.ok_or_else(|| malformed(no, "missing m"))?;
    let hidden_ratio = hidden_ratio.ok_or_else(|| malformed(no, "missing hidden_ratio"))?;

    expect_section(&mut lines, "[input_normalizer]")?;
    let input_normalizer = parse_normalizer(&mut lines, n)?;

    expect_section(&mut lines, "[feature_map]")?;
    let mut clusters = Vec::new();
    let mut covered = 0usize;
    while covered < n {
        let (no, line) = lines.next("feature map cluster")?;
        let cluster: Vec<usize> = line
            .split_whitespace()
            .map(|t| parse_num::<usize>(no, t))
            .collect::<Result<_, _>>()?;
        if cluster.is_empty() {
            return Err(malformed(no, "empty cluster line"));
        }
        covered += cluster.len();
        clusters.push(cluster);
    }
    let feature_map = FeatureMap::from_clusters(clusters, n, m)
        .map_err(|e| malformed(0, format!("invalid feature map: {e}")))?;
    let n_clusters = feature_map.clusters().len();

    expect_section(&mut lines, "[ensemble]")?;
    let mut ensemble = Vec::with_capacity(n_clusters);
    for _ in 0..n_clusters {
        ensemble.push(parse_autoencoder(&mut lines)?);
    }

    expect_section(&mut lines, "[score_normalizer]")?;
    let score_normalizer = parse_normalizer(&mut lines, n_clusters)?;

    expect_section(&mut lines, "[output_autoencoder]")?;
    let output_ae = parse_autoencoder(&mut lines)?;

    expect_section(&mut lines, "[calibration]")?;
    let (no, line) = lines.next("calibration values")?;
    let mut phi = None;
    let mut beta = None;
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| malformed(no, format!("bad calibration token {token}")))?;
        match key {
            "phi" => phi = Some(parse_num::<f64>(no, value)?),
            "beta_threshold" => beta = Some(parse_num::<f64>(no, value)?),
            other => return Err(malformed(no, format!("unknown calibration key {other}"))),
        }
    }
    let phi = phi.ok_or_else(|| malformed(no, "missing phi"))?;
    let beta = beta.ok_or_else(|| malformed(no, "missing beta_threshold"))?;
    let calib = super::calibrate_threshold(phi, beta)
        .map_err(|e| malformed(no, format!("invalid calibration: {e}")))?;

    let model = KitNetModel::from_parts(
        input_normalizer,
        feature_map,
        ensemble,
        score_normalizer,
        output_ae,
        hidden_ratio,
    )
    .map_err(|e| malformed(0, format!("inconsistent model: {e}")))?;
    Ok((model, calib))
}

fn expect_section(lines: &mut Lines, name: &str) -> Result<(), ModelFileError> {
    let (no, line) = lines.next(name)?;
    if line.trim() != name {
        return Err(malformed(no, format!("expected section {name}, found {line:?}")));
    }
    Ok(())
}

fn parse_num<T: std::str::FromStr>(line: usize, token: &str) -> Result<T, ModelFileError> {
    token
        .trim()
        .parse()
        .map_err(|_| malformed(line, format!("unparseable number {token:?}")))
}

fn parse_float_row(lines: &mut Lines, expected_len: usize) -> Result<Vec<f64>, ModelFileError> {
    let (no, line) = lines.next("numeric row")?;
    let row: Vec<f64> = line
        .split(',')
        .map(|t| parse_num::<f64>(no, t))
        .collect::<Result<_, _>>()?;
    if row.len() != expected_len {
        return Err(malformed(
            no,
            format!("expected {expected_len} values, found {}", row.len()),
        ));
    }
    Ok(row)
}

fn parse_normalizer(lines: &mut Lines, dim: usize) -> Result<MinMaxNormalizer, ModelFileError> {
    let mins = parse_float_row(lines, dim)?;
    let maxs = parse_float_row(lines, dim)?;
    MinMaxNormalizer::from_bounds(mins, maxs).map_err(|e| malformed(0, format!("invalid normalizer: {e}")))
}

fn parse_autoencoder(lines: &mut Lines) -> Result<Autoencoder, ModelFileError> {
    let (no, line) = lines.next("autoencoder header")?;
    let trimmed = line.trim();
    let inner = trimmed
        .strip_prefix("[autoencoder ")
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(|| malformed(no, format!("expected autoencoder header, found {line:?}")))?;
    let mut parts = inner.split_whitespace();
    let input_dim: usize = parse_num(no, parts.next().ok_or_else(|| malformed(no, "missing input dim"))?)?;
    let hidden_dim: usize =
        parse_num(no, parts.next().ok_or_else(|| malformed(no, "missing hidden dim"))?)?;

    let encoder = parse_layer(lines, input_dim, hidden_dim)?;
    let decoder = parse_layer(lines, hidden_dim, input_dim)?;
    Autoencoder::new(encoder, decoder).map_err(|e| malformed(no, format!("invalid autoencoder: {e}")))
}

fn parse_layer(lines: &mut Lines, in_dim: usize, out_dim: usize) -> Result<DenseLayer, ModelFileError> {
    let mut weights = Vec::with_capacity(in_dim * out_dim);
    for _ in 0..out_dim {
        weights.extend(parse_float_row(lines, in_dim)?);
    }
    let biases = parse_float_row(lines, out_dim)?;
    DenseLayer::from_parts(in_dim, out_dim, weights, biases, Activation::Sigmoid)
        .map_err(|e| malformed(0, format!("invalid layer: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitnet::{train_online, TrainingConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn trained() -> (KitNetModel, ThresholdCalibration) {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let stream: Vec<Vec<f64>> = (0..260)
            .map(|_| (0..6).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let cfg = TrainingConfig {
            fm_window: 60,
            train_window: 200,
            max_cluster_size: 3,
            ..TrainingConfig::default()
        };
        train_online(&stream, &cfg).unwrap()
    }

    #[test]
    fn round_trip_scores_are_bit_identical() {
        let (model, calib) = trained();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.txt");
        save_model(&model, &calib, &path).unwrap();
        let (loaded, loaded_calib) = load_model(&path).unwrap();
        assert_eq!(calib, loaded_calib);

        let mut rng = ChaCha20Rng::seed_from_u64(33);
        for _ in 0..100 {
            let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..2.0)).collect();
            let a = model.score(&x).unwrap();
            let b = loaded.score(&x).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn truncated_file_is_malformed() {
        let (model, calib) = trained();
        let text = render_model(&model, &calib);
        let cut = &text[..text.len() / 2];
        assert!(matches!(
            parse_model(cut).unwrap_err(),
            ModelFileError::Malformed { .. }
        ));
    }

    #[test]
    fn unknown_version_is_rejected() {
        let err = parse_model("kitbench-model v99\n").unwrap_err();
        match err {
            ModelFileError::Version { found } => assert_eq!(found, "kitbench-model v99"),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
