//! Experiment harness: threshold sweeps with FPR/FNR/accuracy, ROC/AUC,
//! sample selection, attack campaigns, and the ENM hyperparameter sweeps.
//!
//! Rates are reported as percentages (0-100), matching the campaign tables;
//! ROC points are fractions in `[0, 1]` with fixed `(0,0)` and `(1,1)`
//! endpoints.

mod campaign;

pub use campaign::{
    run_attack_campaign, sweep_enm_beta, sweep_enm_c, AttackCampaignReport, AttackMethod,
    CampaignConfig, SweepPoint, SweepReport, Violation,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::AttackError;
use crate::data::LabeledDataset;
use crate::kitnet::{KitNetModel, KitnetError, Label};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("evaluation error: {0}")]
    Invalid(String),
    #[error("dataset contains only one class; ROC is undefined")]
    SingleClass,
    #[error("not enough eligible rows: requested {requested}, have {available}")]
    NotEnoughRows { requested: usize, available: usize },
    #[error(transparent)]
    Kitnet(#[from] KitnetError),
    #[error(transparent)]
    Attack(#[from] AttackError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGridPoint {
    pub threshold: f64,
    /// Percentage of benign rows flagged malicious.
    pub fpr: f64,
    /// Percentage of malicious rows classified benign.
    pub fnr: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweepReport {
    pub schema_version: u32,
    pub grid: Vec<SweepGridPoint>,
    /// `(fpr, tpr)` fractions from `(0,0)` to `(1,1)`.
    pub roc: Vec<(f64, f64)>,
    pub auc: f64,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub resolved_config: serde_json::Value,
}

/// Scores the dataset once and evaluates FPR/FNR/accuracy on an evenly
/// spaced threshold grid, plus the ROC curve and trapezoidal AUC from the
/// same score set.
pub fn sweep_threshold(
    model: &KitNetModel,
    dataset: &LabeledDataset,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<ThresholdSweepReport, EvalError> {
    if steps < 2 {
        return Err(EvalError::Invalid("sweep needs at least 2 grid points".into()));
    }
    if !(t_min < t_max) {
        return Err(EvalError::Invalid(format!("invalid grid bounds [{t_min}, {t_max}]")));
    }

    let mut benign_scores = Vec::new();
    let mut malicious_scores = Vec::new();
    for (row, label) in dataset.rows().iter().zip(dataset.labels()) {
        let s = model.score(row)?;
        match label {
            Label::Benign => benign_scores.push(s),
            Label::Malicious => malicious_scores.push(s),
        }
    }
    if benign_scores.is_empty() || malicious_scores.is_empty() {
        return Err(EvalError::SingleClass);
    }

    let total = (benign_scores.len() + malicious_scores.len()) as f64;
    let grid = (0..steps)
        .map(|i| {
            let t = t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64;
            let fp = benign_scores.iter().filter(|&&s| s >= t).count();
            let fnc = malicious_scores.iter().filter(|&&s| s < t).count();
            let correct =
                (benign_scores.len() - fp) + (malicious_scores.len() - fnc);
            SweepGridPoint {
                threshold: t,
                fpr: 100.0 * fp as f64 / benign_scores.len() as f64,
                fnr: 100.0 * fnc as f64 / malicious_scores.len() as f64,
                accuracy: 100.0 * correct as f64 / total,
            }
        })
        .collect();

    let roc = roc_points(&benign_scores, &malicious_scores)?;
    let auc = trapezoid_auc(&roc);
    Ok(ThresholdSweepReport {
        schema_version: REPORT_SCHEMA_VERSION,
        grid,
        roc,
        auc,
        resolved_config: serde_json::Value::Null,
    })
}

/// ROC curve `(fpr, tpr)` over all distinct score thresholds, descending, so
/// the curve runs from `(0,0)` to `(1,1)`. Tied scores collapse into a
/// single diagonal segment.
pub fn roc_points(
    scores_benign: &[f64],
    scores_malicious: &[f64],
) -> Result<Vec<(f64, f64)>, EvalError> {
    if scores_benign.is_empty() || scores_malicious.is_empty() {
        return Err(EvalError::SingleClass);
    }
    let mut tagged: Vec<(f64, bool)> = scores_benign
        .iter()
        .map(|&s| (s, false))
        .chain(scores_malicious.iter().map(|&s| (s, true)))
        .collect();
    tagged.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let nb = scores_benign.len() as f64;
    let nm = scores_malicious.len() as f64;
    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < tagged.len() {
        let score = tagged[i].0;
        while i < tagged.len() && tagged[i].0 == score {
            if tagged[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / nb, tp as f64 / nm));
    }
    Ok(points)
}

fn trapezoid_auc(roc: &[(f64, f64)]) -> f64 {
    roc.windows(2)
        .map(|w| {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            (x1 - x0) * (y0 + y1) / 2.0
        })
        .sum()
}

/// Probability that a random malicious score exceeds a random benign one,
/// with ties counting one half; computed as the trapezoidal area under the
/// ROC sweep.
pub fn roc_auc(scores_benign: &[f64], scores_malicious: &[f64]) -> Result<f64, EvalError> {
    Ok(trapezoid_auc(&roc_points(scores_benign, scores_malicious)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStrategy {
    /// Seeded uniform sample without replacement from the class.
    RandomOfClass,
    /// The rows whose scores are closest to the threshold, ties broken by
    /// row index.
    NearestThreshold,
}

pub fn select_samples(
    dataset: &LabeledDataset,
    model: &KitNetModel,
    strategy: SelectionStrategy,
    class: Label,
    n: usize,
    seed: u64,
    threshold: f64,
) -> Result<Vec<usize>, EvalError> {
    let mut eligible: Vec<usize> = dataset
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == class)
        .map(|(i, _)| i)
        .collect();
    if n > eligible.len() {
        return Err(EvalError::NotEnoughRows {
            requested: n,
            available: eligible.len(),
        });
    }

    match strategy {
        SelectionStrategy::RandomOfClass => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            // partial Fisher-Yates
            for i in 0..n {
                let j = rng.gen_range(i..eligible.len());
                eligible.swap(i, j);
            }
            eligible.truncate(n);
            Ok(eligible)
        }
        SelectionStrategy::NearestThreshold => {
            let mut scored: Vec<(f64, usize)> = eligible
                .into_iter()
                .map(|i| Ok(((model.score(&dataset.rows()[i])? - threshold).abs(), i)))
                .collect::<Result<_, KitnetError>>()?;
            scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            Ok(scored.into_iter().take(n).map(|(_, i)| i).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::norm_score_model;

    fn pair_count_auc(benign: &[f64], malicious: &[f64]) -> f64 {
        let mut total = 0.0;
        for &m in malicious {
            for &b in benign {
                total += if m > b {
                    1.0
                } else if m == b {
                    0.5
                } else {
                    0.0
                };
            }
        }
        total / (benign.len() * malicious.len()) as f64
    }

    #[test]
    fn auc_examples() {
        // all ties
        assert_eq!(roc_auc(&[0.5, 0.5], &[0.5, 0.5, 0.5]).unwrap(), 0.5);
        // perfect separation
        assert_eq!(roc_auc(&[0.1, 0.2], &[0.5, 0.9]).unwrap(), 1.0);
        assert!(matches!(roc_auc(&[], &[0.1]), Err(EvalError::SingleClass)));
    }

    #[test]
    fn sweep_auc_matches_pair_counting() {
        let mut rng = ChaCha20Rng::seed_from_u64(42);
        for _ in 0..20 {
            let benign: Vec<f64> = (0..12).map(|_| (rng.gen_range(0..40) as f64) / 10.0).collect();
            let malicious: Vec<f64> = (0..8).map(|_| (rng.gen_range(0..40) as f64) / 10.0).collect();
            let sweep = roc_auc(&benign, &malicious).unwrap();
            let brute = pair_count_auc(&benign, &malicious);
            assert!((sweep - brute).abs() < 1e-12, "{sweep} vs {brute}");
        }
    }

    #[test]
    fn roc_endpoints_are_fixed() {
        let roc = roc_points(&[0.1, 0.4, 0.4], &[0.3, 0.9]).unwrap();
        assert_eq!(*roc.first().unwrap(), (0.0, 0.0));
        assert_eq!(*roc.last().unwrap(), (1.0, 1.0));
    }

    fn toy_dataset() -> LabeledDataset {
        // scores under norm_score_model(1) are |x|
        let rows = vec![
            vec![0.1],
            vec![0.2],
            vec![0.3],
            vec![0.8],
            vec![0.9],
            vec![0.95],
        ];
        let labels = vec![
            Label::Benign,
            Label::Benign,
            Label::Benign,
            Label::Malicious,
            Label::Malicious,
            Label::Malicious,
        ];
        LabeledDataset::new(rows, labels).unwrap()
    }

    #[test]
    fn threshold_zero_flags_everything() {
        let model = norm_score_model(1);
        let report = sweep_threshold(&model, &toy_dataset(), 0.0, 2.0, 5).unwrap();
        let first = &report.grid[0];
        assert_eq!(first.threshold, 0.0);
        assert_eq!(first.fpr, 100.0);
        assert_eq!(first.fnr, 0.0);
    }

    #[test]
    fn fpr_monotone_down_fnr_monotone_up() {
        let model = norm_score_model(1);
        let report = sweep_threshold(&model, &toy_dataset(), 0.0, 2.0, 40).unwrap();
        for w in report.grid.windows(2) {
            assert!(w[1].fpr <= w[0].fpr);
            assert!(w[1].fnr >= w[0].fnr);
        }
    }

    #[test]
    fn separable_data_has_auc_one() {
        let model = norm_score_model(1);
        let report = sweep_threshold(&model, &toy_dataset(), 0.0, 2.0, 10).unwrap();
        assert_eq!(report.auc, 1.0);
    }

    #[test]
    fn single_class_dataset_is_rejected() {
        let model = norm_score_model(1);
        let ds = LabeledDataset::new(vec![vec![0.1], vec![0.2]], vec![Label::Benign, Label::Benign])
            .unwrap();
        assert!(matches!(
            sweep_threshold(&model, &ds, 0.0, 1.0, 5),
            Err(EvalError::SingleClass)
        ));
    }

    #[test]
    fn select_whole_class_returns_every_row() {
        let model = norm_score_model(1);
        let ds = toy_dataset();
        let mut sel = select_samples(&ds, &model, SelectionStrategy::RandomOfClass, Label::Benign, 3, 7, 1.0)
            .unwrap();
        sel.sort_unstable();
        assert_eq!(sel, vec![0, 1, 2]);
    }

    #[test]
    fn nearest_threshold_picks_the_closest_score() {
        let model = norm_score_model(1);
        let rows = vec![vec![0.2], vec![0.95], vec![3.0]];
        let labels = vec![Label::Benign; 3];
        let ds = LabeledDataset::new(rows, labels).unwrap();
        let sel = select_samples(
            &ds,
            &model,
            SelectionStrategy::NearestThreshold,
            Label::Benign,
            1,
            0,
            1.0,
        )
        .unwrap();
        assert_eq!(sel, vec![1]);
    }

    #[test]
    fn selection_is_deterministic_in_the_seed() {
        let model = norm_score_model(1);
        let ds = toy_dataset();
        let a = select_samples(&ds, &model, SelectionStrategy::RandomOfClass, Label::Malicious, 2, 5, 1.0)
            .unwrap();
        let b = select_samples(&ds, &model, SelectionStrategy::RandomOfClass, Label::Malicious, 2, 5, 1.0)
            .unwrap();
        assert_eq!(a, b);

        assert!(matches!(
            select_samples(&ds, &model, SelectionStrategy::RandomOfClass, Label::Benign, 9, 5, 1.0),
            Err(EvalError::NotEnoughRows { .. })
        ));
    }

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
}
