//! Iterative L2 attack: minimizes `||x' - x||_2^2 + c * loss(x')` by
//! gradient descent in a tanh change of variables that keeps the iterate
//! smoothly inside the box, with an optional outer binary search over `c`.

use serde::{Deserialize, Serialize};

use crate::kitnet::{KitNetModel, ThresholdCalibration};

use super::{adversarial_loss_gradient, is_target, AdversarialResult, AttackError, AttackSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CwConfig {
    /// Weight of the misclassification constraint against the L2 term.
    pub c: f64,
    pub learning_rate: f64,
    pub max_steps: usize,
    pub confidence: f64,
    /// Outer binary-search rounds over `c`; 0 disables the search.
    pub binary_search_steps: usize,
}

impl Default for CwConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            learning_rate: 0.05,
            max_steps: 1000,
            confidence: 0.0,
            binary_search_steps: 0,
        }
    }
}

fn validate(cfg: &CwConfig) -> Result<(), AttackError> {
    if !(cfg.c > 0.0) || !(cfg.learning_rate > 0.0) || cfg.max_steps == 0 || !(cfg.confidence >= 0.0) {
        return Err(AttackError::Config(
            "cw requires positive c, learning_rate, max_steps and non-negative confidence".into(),
        ));
    }
    Ok(())
}

pub fn cw_l2(
    model: &KitNetModel,
    x: &[f64],
    spec: &AttackSpec,
    cfg: &CwConfig,
    calib: &ThresholdCalibration,
) -> Result<AdversarialResult, AttackError> {
    validate(cfg)?;
    if !spec.is_finite_box() {
        return Err(AttackError::Config(
            "cw_l2 requires finite box bounds for the change of variables".into(),
        ));
    }

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
                c = (lower + upper) / 2.0;
            } else {
                lower = c;
                c = if upper.is_finite() { (lower + upper) / 2.0 } else { c * 10.0 };
            }
        }
    }

    match best {
        Some((_, adv)) => AdversarialResult::success(x.to_vec(), adv, iterations),
        None => Ok(AdversarialResult::failure(x.to_vec(), iterations)),
    }
}

/// One optimization round at a fixed `c`; tracks the best successful iterate
/// by L2 distance in `best` and reports whether this round found any.
#[allow(clippy::too_many_arguments)]
fn run_round(
    model: &KitNetModel,
    x: &[f64],
    spec: &AttackSpec,
    cfg: &CwConfig,
    calib: &ThresholdCalibration,
    c: f64,
    best: &mut Option<(f64, Vec<f64>)>,
    iterations: &mut usize,
) -> Result<bool, AttackError> {
    let dim = x.len();
    let half_range: Vec<f64> = (0..dim)
        .map(|i| (spec.box_high[i] - spec.box_low[i]) / 2.0)
        .collect();
    let mid: Vec<f64> = (0..dim)
        .map(|i| (spec.box_high[i] + spec.box_low[i]) / 2.0)
        .collect();

    // w such that x(w) = mid + half_range * tanh(w) starts at the original
    // input, nudged off the box boundary where atanh diverges
    let mut w: Vec<f64> = (0..dim)
        .map(|i| {
            if half_range[i] == 0.0 {
                0.0
            } else {
                let u = ((x[i] - mid[i]) / half_range[i]).clamp(-1.0 + 1e-6, 1.0 - 1e-6);
                u.atanh()
            }
        })
        .collect();

    let mut found = false;
    for _ in 0..cfg.max_steps {
        let adv: Vec<f64> = (0..dim).map(|i| mid[i] + half_range[i] * w[i].tanh()).collect();

        if is_target(model, &adv, spec.target_label, calib)? {
            let l2 = super::lp_distances(x, &adv, super::L0_TOLERANCE)?.l2;
            if best.as_ref().map_or(true, |(b, _)| l2 < *b) {
                *best = Some((l2, adv.clone()));
            }
            found = true;
        }

        let (_, loss_grad) =
            adversarial_loss_gradient(model, &adv, spec.target_label, calib, cfg.confidence)?;
        for i in 0..dim {
            let obj_grad = 2.0 * (adv[i] - x[i]) + c * loss_grad[i];
            let t = w[i].tanh();
            w[i] -= cfg.learning_rate * obj_grad * half_range[i] * (1.0 - t * t);
        }
        *iterations += 1;
    }

    // evaluate the final iterate as well
    let adv: Vec<f64> = (0..dim).map(|i| mid[i] + half_range[i] * w[i].tanh()).collect();
    if is_target(model, &adv, spec.target_label, calib)? {
        let l2 = super::lp_distances(x, &adv, super::L0_TOLERANCE)?.l2;
        if best.as_ref().map_or(true, |(b, _)| l2 < *b) {
            *best = Some((l2, adv));
        }
        found = true;
    }
    Ok(found)
}
