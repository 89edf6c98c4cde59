//! Adversarial example generation against the thresholded detector, plus the
//! `L_p` perturbation metrics the campaign tables report.
//!
//! All four methods drive the same hinge loss on the two-logit head:
//! `max(logit_nontarget - logit_target + confidence, 0)`, which is zero
//! exactly when the input is classified as the target with the requested
//! margin.

mod cw;
mod enm;
mod fgsm;
mod jsma;

pub use cw::{cw_l2, CwConfig};
pub use enm::{enm, EnmConfig};
pub use fgsm::{fgsm, FgsmConfig};
pub use jsma::{jsma, saliency_map, JsmaConfig};

use serde::{Deserialize, Serialize};

use crate::kitnet::{classify_score, KitNetModel, KitnetError, Label, ThresholdCalibration};

/// Absolute tolerance below which a per-feature delta does not count toward
/// the `L0` distance; iterative attacks leave sub-rounding residue.
pub const L0_TOLERANCE: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum AttackError {
    #[error("attack config error: {0}")]
    Config(String),
    #[error(transparent)]
    Kitnet(#[from] KitnetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    L0,
    L1,
    L2,
    Linf,
}

/// Target label plus the valid input box the perturbed vector must stay in.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub target_label: Label,
    pub box_low: Vec<f64>,
    pub box_high: Vec<f64>,
    pub metric: DistanceMetric,
}

impl AttackSpec {
    /// Default `[0, 1]` box over the normalized feature space.
    pub fn unit_box(target_label: Label, dim: usize, metric: DistanceMetric) -> Self {
        Self {
            target_label,
            box_low: vec![0.0; dim],
            box_high: vec![1.0; dim],
            metric,
        }
    }

    pub fn unbounded(target_label: Label, dim: usize, metric: DistanceMetric) -> Self {
        Self {
            target_label,
            box_low: vec![f64::NEG_INFINITY; dim],
            box_high: vec![f64::INFINITY; dim],
            metric,
        }
    }

    pub fn with_box(mut self, low: Vec<f64>, high: Vec<f64>) -> Result<Self, AttackError> {
        if low.len() != high.len() || low.iter().zip(&high).any(|(l, h)| l > h) {
            return Err(AttackError::Config("box_low must be <= box_high elementwise".into()));
        }
        self.box_low = low;
        self.box_high = high;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.box_low.len()
    }

    pub fn is_finite_box(&self) -> bool {
        self.box_low.iter().chain(&self.box_high).all(|v| v.is_finite())
    }

    pub fn clip(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.box_low[i], self.box_high[i]);
        }
    }
}

/// Hinge loss on the two logits; zero iff classified as the target with
/// margin at least `confidence`.
pub fn adversarial_loss_from_score(
    score: f64,
    target_label: Label,
    calib: &ThresholdCalibration,
    confidence: f64,
) -> f64 {
    let (benign, malicious) = crate::kitnet::logits_from_score(score, calib);
    let (target, nontarget) = match target_label {
        Label::Benign => (benign, malicious),
        Label::Malicious => (malicious, benign),
    };
    (nontarget - target + confidence).max(0.0)
}

pub fn adversarial_loss(
    model: &KitNetModel,
    x: &[f64],
    target_label: Label,
    calib: &ThresholdCalibration,
    confidence: f64,
) -> Result<f64, AttackError> {
    Ok(adversarial_loss_from_score(
        model.score(x)?,
        target_label,
        calib,
        confidence,
    ))
}

/// Loss value together with its input gradient. The logits are affine in
/// `S`, so the gradient is `-2 dS/dx` toward a malicious target and
/// `+2 dS/dx` toward a benign one while the hinge is active, and zero once
/// the target margin is met.
pub fn adversarial_loss_gradient(
    model: &KitNetModel,
    x: &[f64],
    target_label: Label,
    calib: &ThresholdCalibration,
    confidence: f64,
) -> Result<(f64, Vec<f64>), AttackError> {
    let (score, grads) = model.score_gradients(x)?;
    let loss = adversarial_loss_from_score(score, target_label, calib, confidence);
    if loss <= 0.0 {
        return Ok((loss, vec![0.0; x.len()]));
    }
    let factor = match target_label {
        Label::Malicious => -2.0,
        Label::Benign => 2.0,
    };
    Ok((loss, grads.input.into_iter().map(|g| factor * g).collect()))
}

/// `L_p` distances between an original and a perturbed vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpDistances {
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

pub fn lp_distances(x: &[f64], x_adv: &[f64], l0_tolerance: f64) -> Result<LpDistances, AttackError> {
    if x.len() != x_adv.len() {
        return Err(AttackError::Kitnet(KitnetError::Shape {
            expected: x.len(),
            got: x_adv.len(),
        }));
    }
    let mut l0 = 0usize;
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for (a, b) in x.iter().zip(x_adv) {
        let d = (a - b).abs();
        if d > l0_tolerance {
            l0 += 1;
        }
        l1 += d;
        l2 += d * d;
        linf = linf.max(d);
    }
    Ok(LpDistances {
        l0: l0 as f64,
        l1,
        l2: l2.sqrt(),
        linf,
    })
}

/// Outcome of one attack on one sample. A failed attack keeps the original
/// input and records no adversarial vector or distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialResult {
    pub original: Vec<f64>,
    pub adversarial: Option<Vec<f64>>,
    pub success: bool,
    pub iterations: usize,
    pub distances: Option<LpDistances>,
}

impl AdversarialResult {
    pub fn success(original: Vec<f64>, adversarial: Vec<f64>, iterations: usize) -> Result<Self, AttackError> {
        let distances = lp_distances(&original, &adversarial, L0_TOLERANCE)?;
        Ok(Self {
            original,
            adversarial: Some(adversarial),
            success: true,
            iterations,
            distances: Some(distances),
        })
    }

    pub fn failure(original: Vec<f64>, iterations: usize) -> Self {
        Self {
            original,
            adversarial: None,
            success: false,
            iterations,
            distances: None,
        }
    }
}

pub(crate) fn is_target(
    model: &KitNetModel,
    x: &[f64],
    target_label: Label,
    calib: &ThresholdCalibration,
) -> Result<bool, AttackError> {
    Ok(classify_score(model.score(x)?, calib) == target_label)
}

/// Elementwise soft-thresholding toward `center`: the proximal operator of
/// `shrink * |u - center|_1`, which the iterative shrinkage step uses.
pub fn soft_threshold(z: &[f64], center: &[f64], shrink: f64) -> Vec<f64> {
    z.iter()
        .zip(center)
        .map(|(&zi, &ci)| {
            let d = zi - ci;
            ci + (d.abs() - shrink).max(0.0) * sign(d)
        })
        .collect()
}

/// Sign with `sign(0) = 0` (f64::signum maps 0.0 to 1.0).
#[inline]
pub(crate) fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Hand-built model with the closed form `S(x) = ||x||_2 / sqrt(dim)`:
/// identity input scaling, one cluster, zero reconstructions. Used by the
/// attack tests, which need an analytically known score surface.
#[cfg(test)]
pub(crate) fn norm_score_model(dim: usize) -> KitNetModel {
    use crate::kitnet::{FeatureMap, MinMaxNormalizer};
    use crate::nn::{Activation, Autoencoder, DenseLayer};

    let identity = |d: usize| {
        let mut w = vec![0.0; d * d];
        for i in 0..d {
            w[i * d + i] = 1.0;
        }
        DenseLayer::from_parts(d, d, w, vec![0.0; d], Activation::Identity).unwrap()
    };
    let zero = |in_d: usize, out_d: usize| {
        DenseLayer::from_parts(in_d, out_d, vec![0.0; in_d * out_d], vec![0.0; out_d], Activation::Identity)
            .unwrap()
    };

    let input_norm = MinMaxNormalizer::from_bounds(vec![0.0; dim], vec![1.0; dim]).unwrap();
    let fm = FeatureMap::from_clusters(vec![(0..dim).collect()], dim, dim.max(1)).unwrap();
    let ae = Autoencoder::new(identity(dim), zero(dim, dim)).unwrap();
    let score_norm = MinMaxNormalizer::from_bounds(vec![0.0], vec![1.0]).unwrap();
    let out_ae = Autoencoder::new(identity(1), zero(1, 1)).unwrap();
    KitNetModel::from_parts(input_norm, fm, vec![ae], score_norm, out_ae, 0.75).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_is_zero_when_target_met_with_margin() {
        let calib = ThresholdCalibration::from_threshold(1.0);
        // S = 2.2, target malicious: margin 2S - 2T = 2.4 > confidence
        assert_eq!(adversarial_loss_from_score(2.2, Label::Malicious, &calib, 1.0), 0.0);
    }

    #[test]
    fn loss_hand_arithmetic() {
        // T = 1, S = 0.4, target malicious: max((2 - 0.4) - 0.4, 0) = 1.2
        let calib = ThresholdCalibration::from_threshold(1.0);
        let loss = adversarial_loss_from_score(0.4, Label::Malicious, &calib, 0.0);
        assert!((loss - 1.2).abs() < 1e-15);
    }

    #[test]
    fn loss_is_nonnegative() {
        let calib = ThresholdCalibration::from_threshold(0.5);
        for s in [-3.0, 0.0, 0.49, 0.5, 0.51, 10.0] {
            for target in [Label::Benign, Label::Malicious] {
                assert!(adversarial_loss_from_score(s, target, &calib, 0.3) >= 0.0);
            }
        }
    }

    #[test]
    fn lp_distance_examples() {
        let d = lp_distances(&[1.0, 2.0], &[1.0, 2.0], L0_TOLERANCE).unwrap();
        assert_eq!((d.l0, d.l1, d.l2, d.linf), (0.0, 0.0, 0.0, 0.0));

        // delta = [0.3, -0.4]: the 3-4-5 triangle
        let d = lp_distances(&[0.5, 0.5], &[0.2, 0.9], L0_TOLERANCE).unwrap();
        assert_eq!(d.l0, 2.0);
        assert!((d.l1 - 0.7).abs() < 1e-15);
        assert!((d.l2 - 0.5).abs() < 1e-15);
        assert!((d.linf - 0.4).abs() < 1e-15);

        // below-tolerance deltas count toward L1 but not L0
        let d = lp_distances(&[0.0], &[1e-9], 1e-6).unwrap();
        assert_eq!(d.l0, 0.0);
        assert!(d.l1 > 0.0);

        assert!(lp_distances(&[0.0], &[0.0, 1.0], L0_TOLERANCE).is_err());
    }

    #[test]
    fn soft_threshold_examples() {
        // full shrinkage inside the dead zone
        assert_eq!(soft_threshold(&[0.3], &[0.0], 0.5), vec![0.0]);
        // z=1.2, center=0, shrink=0.5 -> 0.7
        let out = soft_threshold(&[1.2], &[0.0], 0.5);
        assert!((out[0] - 0.7).abs() < 1e-15);
        // shrinkage toward a nonzero center
        let out = soft_threshold(&[0.2], &[1.0], 0.3);
        assert!((out[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn soft_threshold_matches_grid_search_argmin() {
        // argmin_u 0.5 (u - z)^2 + shrink |u - center|
        for &(z, center, shrink) in &[(1.2, 0.0, 0.5), (-0.8, 0.1, 0.3), (0.4, 0.5, 0.2), (2.0, -1.0, 0.7)] {
            let analytic = soft_threshold(&[z], &[center], shrink)[0];
            let mut best_u = f64::NAN;
            let mut best_obj = f64::INFINITY;
            let mut u = -3.0;
            while u <= 3.0 {
                let obj = 0.5 * (u - z) * (u - z) + shrink * (u - center).abs();
                if obj < best_obj {
                    best_obj = obj;
                    best_u = u;
                }
                u += 1e-6;
            }
            assert!(
                (analytic - best_u).abs() <= 1e-6 * 2.0,
                "z={z} center={center} shrink={shrink}: {analytic} vs {best_u}"
            );
        }
    }

    #[test]
    fn soft_threshold_is_nonexpansive() {
        let z = [1.5, -2.0, 0.01, 0.7];
        let c = [0.2, 0.0, 0.0, 0.7];
        let out = soft_threshold(&z, &c, 0.25);
        for ((o, zi), ci) in out.iter().zip(&z).zip(&c) {
            assert!((o - ci).abs() <= (zi - ci).abs() + 1e-15);
        }
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(3.0), 1.0);
        assert_eq!(sign(-0.2), -1.0);
    }

    #[test]
    fn attack_spec_box_validation() {
        let spec = AttackSpec::unit_box(Label::Benign, 2, DistanceMetric::L2);
        assert!(spec.clone().with_box(vec![0.0, 0.0], vec![1.0, -1.0]).is_err());
        assert!(spec.is_finite_box());
        assert!(!AttackSpec::unbounded(Label::Benign, 2, DistanceMetric::L2).is_finite_box());

        let mut x = vec![-0.5, 1.5];
        spec.clip(&mut x);
        assert_eq!(x, vec![0.0, 1.0]);
    }
}
