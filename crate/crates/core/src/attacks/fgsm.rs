//! Fast gradient sign method: one signed step of size `epsilon` on every
//! feature, against the hinge loss, then a box clip.

use serde::{Deserialize, Serialize};

use crate::kitnet::{KitNetModel, ThresholdCalibration};

use super::{adversarial_loss_gradient, is_target, sign, AdversarialResult, AttackError, AttackSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FgsmConfig {
    pub epsilon: f64,
}

impl Default for FgsmConfig {
    fn default() -> Self {
        Self { epsilon: 0.1 }
    }
}

pub fn fgsm(
    model: &KitNetModel,
    x: &[f64],
    spec: &AttackSpec,
    cfg: &FgsmConfig,
    calib: &ThresholdCalibration,
) -> Result<AdversarialResult, AttackError> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return Err(AttackError::Config(format!(
            "epsilon must be finite and positive, got {}",
            cfg.epsilon
        )));
    }
    let (_, grad) = adversarial_loss_gradient(model, x, spec.target_label, calib, 0.0)?;
    let mut adv: Vec<f64> = x
        .iter()
        .zip(&grad)
        .map(|(&xi, &g)| xi - cfg.epsilon * sign(g))
        .collect();
    spec.clip(&mut adv);

    if is_target(model, &adv, spec.target_label, calib)? {
        AdversarialResult::success(x.to_vec(), adv, 1)
    } else {
        Ok(AdversarialResult::failure(x.to_vec(), 1))
    }
}
