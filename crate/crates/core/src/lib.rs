//! Test bench for an autoencoder-ensemble network anomaly detector and
//! gradient-based evasion attacks against it.
//!
//! The crate is organized bottom-up:
//! - [`nn`]: dense layers, autoencoders, reconstruction error, and manual
//!   backpropagation with finite-difference checks.
//! - [`kitnet`]: the detector — min-max normalization, correlation-based
//!   feature clustering, the autoencoder ensemble, online training,
//!   threshold calibration, and text-format persistence.
//! - [`attacks`]: FGSM, a saliency-map attack, an iterative L2 attack, and
//!   an elastic-net attack, all driven by full-model score gradients.
//! - [`evaluation`]: threshold sweeps, ROC/AUC, sample selection, attack
//!   campaigns, and hyperparameter sweeps.
//! - [`data`]: CSV ingestion, synthetic datasets, and report writing.

pub mod attacks;
pub mod data;
pub mod evaluation;
pub mod kitnet;
pub mod nn;

pub use attacks::{
    cw_l2, enm, fgsm, jsma, AdversarialResult, AttackError, AttackSpec, CwConfig, DistanceMetric,
    EnmConfig, FgsmConfig, JsmaConfig, LpDistances,
};
pub use data::{
    generate_synthetic, load_feature_csv, write_dataset_csv, write_report, DataError,
    LabeledDataset, LoadedCsv, Report, ReportFormat, SyntheticConfig,
};
pub use evaluation::{
    roc_auc, run_attack_campaign, select_samples, sweep_enm_beta, sweep_enm_c, sweep_threshold,
    AttackCampaignReport, AttackMethod, CampaignConfig, EvalError, SelectionStrategy, SweepReport,
    ThresholdSweepReport, Violation,
};
pub use kitnet::{
    calibrate_threshold, classify, load_model, save_model, train_online, KitNetModel, KitnetError,
    Label, MinMaxNormalizer, ThresholdCalibration, TrainingConfig,
};
