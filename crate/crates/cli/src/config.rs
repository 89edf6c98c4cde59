//! Structured experiment configuration: a TOML file with one optional
//! section per subcommand. Unknown keys are rejected so typos fail loudly.
//! Resolution order everywhere: command-line flag, then config file, then
//! built-in default.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Global RNG seed; individual sections may not override it.
    pub seed: Option<u64>,
    /// Campaign worker threads; 1 forces sequential execution.
    pub workers: Option<usize>,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub evaluate: EvaluateSection,
    #[serde(default)]
    pub attack: AttackSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub synth: SynthSection,
    #[serde(default)]
    pub calibrate: CalibrateSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub data: Option<PathBuf>,
    pub label_column: Option<String>,
    pub model_out: Option<PathBuf>,
    pub fm_window: Option<usize>,
    pub train_window: Option<usize>,
    pub learning_rate: Option<f64>,
    pub max_cluster_size: Option<usize>,
    pub hidden_ratio: Option<f64>,
    /// Threshold multiplier applied to phi after training.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSection {
    pub model: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub label_column: Option<String>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSection {
    pub model: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub label_column: Option<String>,
    pub method: Option<String>,
    pub violation: Option<String>,
    pub selection: Option<String>,
    pub n: Option<usize>,
    pub threshold: Option<f64>,
    pub box_low: Option<f64>,
    pub box_high: Option<f64>,
    pub unbounded_box: Option<bool>,
    pub epsilon: Option<f64>,
    pub theta: Option<f64>,
    pub max_features: Option<usize>,
    pub c: Option<f64>,
    pub beta_l1: Option<f64>,
    pub learning_rate: Option<f64>,
    pub max_steps: Option<usize>,
    pub confidence: Option<f64>,
    pub binary_search_steps: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub model: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub label_column: Option<String>,
    pub parameter: Option<String>,
    pub values: Option<String>,
    pub n: Option<usize>,
    pub threshold: Option<f64>,
    pub c: Option<f64>,
    pub beta_l1: Option<f64>,
    pub learning_rate: Option<f64>,
    pub max_steps: Option<usize>,
    pub confidence: Option<f64>,
    pub binary_search_steps: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub features: Option<usize>,
    pub benign: Option<usize>,
    pub malicious: Option<usize>,
    pub center: Option<f64>,
    pub spread: Option<f64>,
    pub shift: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateSection {
    pub model: Option<PathBuf>,
    pub model_out: Option<PathBuf>,
    pub beta: Option<f64>,
}

pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

/// Flag value if given, else the config-file value, else the default.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Like [`pick`] but with no default; missing values are a usage error.
pub fn require<T: Clone>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::Usage(format!("missing required value --{name}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<ExperimentConfig>("[train]\nfm_windoow = 5\n").unwrap_err();
        assert!(err.to_string().contains("fm_windoow"));
    }

    #[test]
    fn flags_override_file_values_override_defaults() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick::<u64>(None, None, 3), 3);
    }

    #[test]
    fn missing_required_value_names_the_flag() {
        let err = require::<u64>(None, None, "model").unwrap_err();
        assert!(matches!(err, CliError::Usage(m) if m.contains("--model")));
    }
}
