//! Elastic-net attack: FISTA-style iterative shrinkage-thresholding on
//! `c * loss + beta_l1 * ||x' - x0||_1 + ||x' - x0||_2^2`. The gradient step
//! covers the smooth part; the L1 term enters through the soft-threshold
//! projection toward the original input.

use serde::{Deserialize, Serialize};

use crate::kitnet::{KitNetModel, ThresholdCalibration};

use super::{
    adversarial_loss_gradient, is_target, lp_distances, soft_threshold, AdversarialResult,
    AttackError, AttackSpec, L0_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnmConfig {
    /// Weight of the misclassification constraint.
    pub c: f64,
    /// L1 regularization strength (named to avoid colliding with the
    /// threshold multiplier beta).
    pub beta_l1: f64,
    pub learning_rate: f64,
    pub max_steps: usize,
    pub confidence: f64,
    /// Outer binary-search rounds over `c`; 0 disables the search.
    pub binary_search_steps: usize,
    /// Square the L2 term (smooth at 0); false follows the written
    /// objective literally.
    pub l2_squared: bool,
}

impl Default for EnmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            beta_l1: 1e-2,
            learning_rate: 0.05,
            max_steps: 1000,
            confidence: 0.0,
            binary_search_steps: 0,
            l2_squared: true,
        }
    }
}

fn validate(cfg: &EnmConfig) -> Result<(), AttackError> {
    if !(cfg.c > 0.0)
        || !(cfg.beta_l1 >= 0.0)
        || !(cfg.learning_rate > 0.0)
        || cfg.max_steps == 0
        || !(cfg.confidence >= 0.0)
    {
        return Err(AttackError::Config(
            "enm requires positive c/learning_rate/max_steps and non-negative beta_l1/confidence"
                .into(),
        ));
    }
    Ok(())
}

pub fn enm(
    model: &KitNetModel,
    x: &[f64],
    spec: &AttackSpec,
    cfg: &EnmConfig,
    calib: &ThresholdCalibration,
) -> Result<AdversarialResult, AttackError> {
    validate(cfg)?;

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0usize;

    if cfg.binary_search_steps == 0 {
        run_round(model, x, spec, cfg, calib, cfg.c, &mut best, &mut iterations)?;
    } else {
        let mut lower = 0.0f64;
        let mut upper = f64::INFINITY;
        let mut c = cfg.c;
        for _ in 0..cfg.binary_search_steps {
            let found =
                run_round(model, x, spec, cfg, calib, c, &mut best, &mut iterations)?;
            if found {
                upper = c;
            } else {
                lower = c;
            }
            c = if upper.is_finite() { (lower + upper) / 2.0 } else { c * 10.0 };
        }
    }

    match best {
        Some((_, adv)) => AdversarialResult::success(x.to_vec(), adv, iterations),
        None => Ok(AdversarialResult::failure(x.to_vec(), iterations)),
    }
}

/// Elastic-net ranking distance for best-iterate tracking.
fn elastic_distance(x: &[f64], adv: &[f64], cfg: &EnmConfig) -> Result<f64, AttackError> {
    let d = lp_distances(x, adv, L0_TOLERANCE)?;
    let l2_term = if cfg.l2_squared { d.l2 * d.l2 } else { d.l2 };
    Ok(cfg.beta_l1 * d.l1 + l2_term)
}

#[allow(clippy::too_many_arguments)]
fn run_round(
    model: &KitNetModel,
    x: &[f64],
    spec: &AttackSpec,
    cfg: &EnmConfig,
    calib: &ThresholdCalibration,
    c: f64,
    best: &mut Option<(f64, Vec<f64>)>,
    iterations: &mut usize,
) -> Result<bool, AttackError> {
    let dim = x.len();
    let mut found = false;

    let consider = |candidate: &[f64], best: &mut Option<(f64, Vec<f64>)>| -> Result<bool, AttackError> {
        if is_target(model, candidate, spec.target_label, calib)? {
            let dist = elastic_distance(x, candidate, cfg)?;
            if best.as_ref().map_or(true, |(b, _)| dist < *b) {
                *best = Some((dist, candidate.to_vec()));
            }
            return Ok(true);
        }
        Ok(false)
    };

    found |= consider(x, best)?;

    let mut current = x.to_vec();
    let mut momentum = x.to_vec();
    let shrink = cfg.learning_rate * cfg.beta_l1;

    for k in 1..=cfg.max_steps {
        let (_, loss_grad) =
            adversarial_loss_gradient(model, &momentum, spec.target_label, calib, cfg.confidence)?;

        let mut z = Vec::with_capacity(dim);
        for i in 0..dim {
            let delta = momentum[i] - x[i];
            let l2_grad = if cfg.l2_squared {
                2.0 * delta
            } else {
                // subgradient of the unsquared norm, zero at the kink
                let norm: f64 = momentum
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if norm > 0.0 {
                    delta / norm
                } else {
                    0.0
                }
            };
            z.push(momentum[i] - cfg.learning_rate * (c * loss_grad[i] + l2_grad));
        }

        let mut next = soft_threshold(&z, x, shrink);
        spec.clip(&mut next);

        // FISTA momentum
        let step_weight = k as f64 / (k as f64 + 3.0);
        for i in 0..dim {
            momentum[i] = next[i] + step_weight * (next[i] - current[i]);
        }
        current = next;
        *iterations += 1;

        found |= consider(&current, best)?;
    }

    Ok(found)
}
