//! The detector: an ensemble of per-cluster autoencoders behind a min-max
//! normalizer, whose reconstruction errors are normalized and fed to an
//! aggregate output autoencoder. The aggregate RMSE is the anomaly score
//! `S`; an alarm is raised when `S >= phi * beta`, where `phi` is the
//! highest score recorded during training.

mod feature_map;
mod normalizer;
mod persist;

pub use feature_map::{build_feature_map, FeatureMap};
pub use normalizer::MinMaxNormalizer;
pub use persist::{load_model, render_model, save_model, ModelFileError, MODEL_FORMAT_VERSION};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::nn::{backprop, Autoencoder, GradientBundle, NnError};

#[derive(Debug, thiserror::Error)]
pub enum KitnetError {
    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("data error: {0}")]
    Data(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("training error: {0}")]
    Training(String),
    #[error(transparent)]
    Nn(#[from] NnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Benign,
    Malicious,
}

impl Label {
    pub fn other(self) -> Label {
        match self {
            Label::Benign => Label::Malicious,
            Label::Malicious => Label::Benign,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Benign => write!(f, "benign"),
            Label::Malicious => write!(f, "malicious"),
        }
    }
}

/// Alarm threshold `T = phi * beta_threshold` with `beta_threshold >= 1`, so
/// every score recorded during training stays at or below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCalibration {
    pub phi: f64,
    pub beta_threshold: f64,
    pub threshold: f64,
}

/// `T = phi * beta_threshold`; rejects `beta_threshold < 1.0`.
pub fn calibrate_threshold(phi: f64, beta_threshold: f64) -> Result<ThresholdCalibration, KitnetError> {
    if !(beta_threshold >= 1.0) {
        return Err(KitnetError::Calibration(format!(
            "beta_threshold must be >= 1.0, got {beta_threshold}"
        )));
    }
    if !phi.is_finite() || phi < 0.0 {
        return Err(KitnetError::Calibration(format!("invalid phi {phi}")));
    }
    Ok(ThresholdCalibration {
        phi,
        beta_threshold,
        threshold: phi * beta_threshold,
    })
}

impl ThresholdCalibration {
    /// Fixes the alarm threshold directly, as attack campaigns do.
    pub fn from_threshold(threshold: f64) -> Self {
        Self {
            phi: threshold,
            beta_threshold: 1.0,
            threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    /// Instances used to fit the input normalizer and build the feature map.
    pub fm_window: usize,
    /// Instances used for one-at-a-time SGD training.
    pub train_window: usize,
    pub learning_rate: f64,
    pub max_cluster_size: usize,
    pub hidden_ratio: f64,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            fm_window: 5000,
            train_window: 50000,
            learning_rate: 0.1,
            max_cluster_size: 10,
            hidden_ratio: 0.75,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), KitnetError> {
        if self.fm_window < 1 || self.train_window < 1 || self.max_cluster_size < 1 {
            return Err(KitnetError::Training("window and cluster counts must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(KitnetError::Training("learning rate must be positive".into()));
        }
        if !(self.hidden_ratio > 0.0 && self.hidden_ratio <= 1.0) {
            return Err(KitnetError::Training("hidden ratio must be in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Hidden layer size for an autoencoder over `d` inputs: `ceil(ratio * d)`,
/// clamped so the representation stays strictly compressed when `d > 1`.
pub fn hidden_size(input_dim: usize, hidden_ratio: f64) -> usize {
    let raw = (hidden_ratio * input_dim as f64).ceil() as usize;
    if input_dim > 1 {
        raw.clamp(1, input_dim - 1)
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KitNetModel {
    input_normalizer: MinMaxNormalizer,
    feature_map: FeatureMap,
    ensemble: Vec<Autoencoder>,
    score_normalizer: MinMaxNormalizer,
    output_ae: Autoencoder,
    hidden_ratio: f64,
}

impl KitNetModel {
    pub fn from_parts(
        input_normalizer: MinMaxNormalizer,
        feature_map: FeatureMap,
        ensemble: Vec<Autoencoder>,
        score_normalizer: MinMaxNormalizer,
        output_ae: Autoencoder,
        hidden_ratio: f64,
    ) -> Result<Self, KitnetError> {
        let n_clusters = feature_map.clusters().len();
        if ensemble.len() != n_clusters {
            return Err(KitnetError::Shape {
                expected: n_clusters,
                got: ensemble.len(),
            });
        }
        if feature_map.n_features() != input_normalizer.dim() {
            return Err(KitnetError::Shape {
                expected: input_normalizer.dim(),
                got: feature_map.n_features(),
            });
        }
        for (cluster, ae) in feature_map.clusters().iter().zip(&ensemble) {
            if ae.input_dim() != cluster.len() {
                return Err(KitnetError::Shape {
                    expected: cluster.len(),
                    got: ae.input_dim(),
                });
            }
        }
        if score_normalizer.dim() != n_clusters || output_ae.input_dim() != n_clusters {
            return Err(KitnetError::Shape {
                expected: n_clusters,
                got: output_ae.input_dim(),
            });
        }
        Ok(Self {
            input_normalizer,
            feature_map,
            ensemble,
            score_normalizer,
            output_ae,
            hidden_ratio,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_normalizer.dim()
    }

    pub fn n_clusters(&self) -> usize {
        self.ensemble.len()
    }

    pub fn input_normalizer(&self) -> &MinMaxNormalizer {
        &self.input_normalizer
    }

    pub fn feature_map(&self) -> &FeatureMap {
        &self.feature_map
    }

    pub fn ensemble(&self) -> &[Autoencoder] {
        &self.ensemble
    }

    pub fn score_normalizer(&self) -> &MinMaxNormalizer {
        &self.score_normalizer
    }

    pub fn output_ae(&self) -> &Autoencoder {
        &self.output_ae
    }

    pub fn hidden_ratio(&self) -> f64 {
        self.hidden_ratio
    }

    /// Anomaly score `S` of a raw feature vector: normalize, reconstruct per
    /// cluster, normalize the ensemble RMSE vector, reconstruct through the
    /// aggregate autoencoder, and take the final RMSE.
    pub fn score(&self, x: &[f64]) -> Result<f64, KitnetError> {
        let v = self.input_normalizer.normalize(x)?;
        let mut ensemble_scores = Vec::with_capacity(self.ensemble.len());
        for (k, ae) in self.ensemble.iter().enumerate() {
            let slice = self.feature_map.slice(k, &v);
            let recon = ae.forward(&slice)?;
            ensemble_scores.push(crate::nn::reconstruction_rmse(&slice, &recon)?);
        }
        let z = self.score_normalizer.normalize(&ensemble_scores)?;
        let y = self.output_ae.forward(&z)?;
        Ok(crate::nn::reconstruction_rmse(&z, &y)?)
    }

    /// `d S / d x` through the full pipeline.
    pub fn score_input_gradient(&self, x: &[f64]) -> Result<Vec<f64>, KitnetError> {
        let (_, grads) = self.score_gradients(x)?;
        Ok(grads.input)
    }

    /// Score plus exact gradients with respect to the raw input and to every
    /// autoencoder parameter.
    pub fn score_gradients(&self, x: &[f64]) -> Result<(f64, ScoreGradients), KitnetError> {
        let v = self.input_normalizer.normalize(x)?;

        let mut ensemble_passes = Vec::with_capacity(self.ensemble.len());
        let mut ensemble_scores = Vec::with_capacity(self.ensemble.len());
        for (k, ae) in self.ensemble.iter().enumerate() {
            let slice = self.feature_map.slice(k, &v);
            let pass = backprop(ae, &slice)?;
            ensemble_scores.push(pass.rmse);
            ensemble_passes.push(pass);
        }

        let z = self.score_normalizer.normalize(&ensemble_scores)?;
        let out_pass = backprop(&self.output_ae, &z)?;
        let score = out_pass.rmse;

        // dS/ds_k chains the aggregate RMSE gradient through the score
        // normalizer's linear scaling
        let ds: Vec<f64> = out_pass
            .grads
            .input
            .iter()
            .enumerate()
            .map(|(k, &g)| g * self.score_normalizer.scale(k))
            .collect();

        let mut input = vec![0.0; x.len()];
        let mut ensemble_grads = Vec::with_capacity(self.ensemble.len());
        for (k, pass) in ensemble_passes.into_iter().enumerate() {
            for (pos, &feature_idx) in self.feature_map.clusters()[k].iter().enumerate() {
                input[feature_idx] =
                    ds[k] * pass.grads.input[pos] * self.input_normalizer.scale(feature_idx);
            }
            ensemble_grads.push(pass.grads.scaled(ds[k]));
        }

        Ok((
            score,
            ScoreGradients {
                input,
                ensemble: ensemble_grads,
                output_ae: out_pass.grads,
            },
        ))
    }
}

/// Gradients of the anomaly score with respect to the raw input and to every
/// parameter in the model.
#[derive(Debug, Clone)]
pub struct ScoreGradients {
    pub input: Vec<f64>,
    pub ensemble: Vec<GradientBundle>,
    pub output_ae: GradientBundle,
}

/// The two-logit classification head over the anomaly score: the benign and
/// malicious logits always sum to `2T`, and their argmax agrees with the
/// alarm rule `S >= T` (ties are malicious).
pub fn logits_from_score(score: f64, calib: &ThresholdCalibration) -> (f64, f64) {
    (2.0 * calib.threshold - score, score)
}

pub fn logits(
    model: &KitNetModel,
    x: &[f64],
    calib: &ThresholdCalibration,
) -> Result<(f64, f64), KitnetError> {
    Ok(logits_from_score(model.score(x)?, calib))
}

pub fn classify_score(score: f64, calib: &ThresholdCalibration) -> Label {
    if score >= calib.threshold {
        Label::Malicious
    } else {
        Label::Benign
    }
}

pub fn classify(
    model: &KitNetModel,
    x: &[f64],
    calib: &ThresholdCalibration,
) -> Result<Label, KitnetError> {
    Ok(classify_score(model.score(x)?, calib))
}

/// Unsupervised online training over a stream assumed benign.
///
/// Phase 1 fits the input normalizer and buffers rows for the feature map;
/// phase 2 performs one SGD step per autoencoder per instance while tracing
/// the score normalizer and `phi`, the highest score seen. Each phase-2
/// score is recorded before that instance's parameter updates.
pub fn train_online(
    stream: &[Vec<f64>],
    cfg: &TrainingConfig,
) -> Result<(KitNetModel, ThresholdCalibration), KitnetError> {
    cfg.validate()?;
    let needed = cfg.fm_window + cfg.train_window;
    if stream.len() < needed {
        return Err(KitnetError::Training(format!(
            "stream of {} instances is shorter than fm_window + train_window = {needed}",
            stream.len()
        )));
    }

    // phase 1: normalizer statistics + feature-map buffer
    let mut input_normalizer = MinMaxNormalizer::from_first(&stream[0])?;
    for row in &stream[1..cfg.fm_window] {
        input_normalizer.update(row)?;
    }
    let fm_rows = &stream[..cfg.fm_window];
    let feature_map = if cfg.fm_window >= 2 {
        build_feature_map(fm_rows, cfg.max_cluster_size)?
    } else {
        // a single buffered row carries no correlation structure
        return Err(KitnetError::Training("fm_window must be >= 2".into()));
    };

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut ensemble = Vec::with_capacity(feature_map.clusters().len());
    for cluster in feature_map.clusters() {
        let d = cluster.len();
        ensemble.push(Autoencoder::random(d, hidden_size(d, cfg.hidden_ratio), &mut rng)?);
    }
    let n_clusters = ensemble.len();
    let mut output_ae = Autoencoder::random(
        n_clusters.max(1),
        hidden_size(n_clusters.max(1), cfg.hidden_ratio),
        &mut rng,
    )?;

    // phase 2: online SGD, score-normalizer tracing, running max of S
    let mut score_normalizer: Option<MinMaxNormalizer> = None;
    let mut phi = 0.0f64;
    for row in &stream[cfg.fm_window..needed] {
        input_normalizer.update(row)?;
        let v = input_normalizer.normalize(row)?;

        let mut ensemble_scores = Vec::with_capacity(n_clusters);
        for (k, ae) in ensemble.iter_mut().enumerate() {
            let slice = feature_map.slice(k, &v);
            let pass = backprop(ae, &slice)?;
            ensemble_scores.push(pass.rmse);
            ae.apply_gradients(&pass.grads, cfg.learning_rate)?;
        }

        let norm = match score_normalizer.as_mut() {
            Some(norm) => {
                norm.update(&ensemble_scores)?;
                norm
            }
            None => score_normalizer.insert(MinMaxNormalizer::from_first(&ensemble_scores)?),
        };

        let z = norm.normalize(&ensemble_scores)?;
        let pass = backprop(&output_ae, &z)?;
        phi = phi.max(pass.rmse);
        output_ae.apply_gradients(&pass.grads, cfg.learning_rate)?;
    }

    let score_normalizer =
        score_normalizer.ok_or_else(|| KitnetError::Training("empty training window".into()))?;
    let model = KitNetModel::from_parts(
        input_normalizer,
        feature_map,
        ensemble,
        score_normalizer,
        output_ae,
        cfg.hidden_ratio,
    )?;
    let calib = calibrate_threshold(phi, 1.0)?;
    Ok((model, calib))
}
