//! Saliency-map attack minimizing the number of perturbed features: each
//! iteration moves the single most influential non-saturated feature by a
//! fixed amount, within an `L0` budget of distinct features.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::kitnet::{KitNetModel, KitnetError, Label, ThresholdCalibration};

use super::{is_target, sign, AdversarialResult, AttackError, AttackSpec};

/// Hard cap on perturbation iterations; with a bounded box the loop
/// terminates on saturation well before this.
const MAX_ITERATIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JsmaConfig {
    /// Signed per-feature perturbation applied each iteration.
    pub theta: f64,
    /// Budget of distinct features allowed to change.
    pub max_features: usize,
}

impl Default for JsmaConfig {
    fn default() -> Self {
        Self {
            theta: 0.1,
            max_features: 10,
        }
    }
}

/// Per-feature derivative of `logit_target - logit_nontarget`. With the
/// two-logit head this is `±2 dS/dx`, so the sign tells which direction
/// moves the target logit up.
pub fn saliency_map(
    model: &KitNetModel,
    x: &[f64],
    target_label: Label,
    calib: &ThresholdCalibration,
) -> Result<Vec<f64>, AttackError> {
    let _ = calib; // the margin is affine in S, so T drops out of the derivative
    let grad = model.score_input_gradient(x)?;
    let factor = match target_label {
        Label::Malicious => 2.0,
        Label::Benign => -2.0,
    };
    Ok(grad.into_iter().map(|g| factor * g).collect())
}

pub fn jsma(
    model: &KitNetModel,
    x: &[f64],
    spec: &AttackSpec,
    cfg: &JsmaConfig,
    calib: &ThresholdCalibration,
) -> Result<AdversarialResult, AttackError> {
    if cfg.max_features == 0 {
        return Err(AttackError::Config("max_features must be >= 1".into()));
    }
    if x.len() != spec.dim() {
        return Err(AttackError::Kitnet(KitnetError::Shape {
            expected: spec.dim(),
            got: x.len(),
        }));
    }

    let mut adv = x.to_vec();
    let mut touched: BTreeSet<usize> = BTreeSet::new();
    let mut iterations = 0usize;

    loop {
        if is_target(model, &adv, spec.target_label, calib)? {
            return AdversarialResult::success(x.to_vec(), adv, iterations);
        }
        if iterations >= MAX_ITERATIONS {
            return Ok(AdversarialResult::failure(x.to_vec(), iterations));
        }

        let saliency = saliency_map(model, &adv, spec.target_label, calib)?;
        let budget_left = touched.len() < cfg.max_features;

        // most salient feature whose step still moves after clipping
        let mut pick: Option<(usize, f64)> = None;
        for (i, &sal) in saliency.iter().enumerate() {
            if sal == 0.0 || (!budget_left && !touched.contains(&i)) {
                continue;
            }
            let step = cfg.theta * sign(sal);
            let moved = (adv[i] + step).clamp(spec.box_low[i], spec.box_high[i]);
            if moved == adv[i] {
                continue; // saturated at the box bound
            }
            match pick {
                Some((_, best)) if sal.abs() <= best => {}
                _ => pick = Some((i, sal.abs())),
            }
        }
        let Some((i, _)) = pick else {
            return Ok(AdversarialResult::failure(x.to_vec(), iterations));
        };

        let step = cfg.theta * sign(saliency[i]);
        adv[i] = (adv[i] + step).clamp(spec.box_low[i], spec.box_high[i]);
        touched.insert(i);
        iterations += 1;
    }
}
