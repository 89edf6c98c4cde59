//! Randomized invariants over the pure numeric helpers: distance metrics,
//! the soft-threshold operator, ROC/AUC, logits, and the normalizer.

use proptest::prelude::*;

use kitbench::attacks::{lp_distances, soft_threshold};
use kitbench::evaluation::{roc_auc, roc_points};
use kitbench::kitnet::{classify_score, logits_from_score, Label, ThresholdCalibration};
use kitbench::nn::reconstruction_rmse;
use kitbench::MinMaxNormalizer;

const L0_TOL: f64 = 1e-6;

fn vec_pair(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0..10.0f64, n),
            prop::collection::vec(-10.0..10.0f64, n),
        )
    })
}

proptest! {
    #[test]
    fn lp_distances_satisfy_norm_inequalities((x, y) in vec_pair(16)) {
        let d = lp_distances(&x, &y, L0_TOL).unwrap();
        let n = x.len() as f64;
        prop_assert!(d.l0 >= 0.0 && d.l0 <= n);
        prop_assert!(d.linf <= d.l2 + 1e-12);
        prop_assert!(d.l2 <= d.l1 + 1e-12);
        prop_assert!(d.l1 <= d.l0 * d.linf + 1e-9);
        prop_assert!(d.l2 * d.l2 <= d.l1 * d.linf + 1e-9);
    }

    #[test]
    fn zero_perturbation_has_zero_distances(x in prop::collection::vec(-10.0..10.0f64, 1..16)) {
        let d = lp_distances(&x, &x, L0_TOL).unwrap();
        prop_assert_eq!(d.l0, 0.0);
        prop_assert_eq!(d.l1, 0.0);
        prop_assert_eq!(d.l2, 0.0);
        prop_assert_eq!(d.linf, 0.0);
    }

    #[test]
    fn soft_threshold_moves_toward_center_without_crossing(
        z in -10.0..10.0f64,
        center in -10.0..10.0f64,
        shrink in 0.0..5.0f64,
    ) {
        let out = soft_threshold(&[z], &[center], shrink)[0];
        // never further from the center than the input, never past it
        prop_assert!((out - center).abs() <= (z - center).abs() + 1e-12);
        prop_assert!((out - center) * (z - center) >= 0.0);
        // snaps exactly when the pull exceeds the offset
        if (z - center).abs() <= shrink {
            prop_assert_eq!(out, center);
        } else {
            prop_assert!((out - center).abs() > 0.0);
            prop_assert!(((z - out).abs() - shrink).abs() < 1e-12);
        }
    }

    #[test]
    fn soft_threshold_with_zero_shrink_is_identity(
        z in prop::collection::vec(-10.0..10.0f64, 1..8),
        center in prop::collection::vec(-10.0..10.0f64, 1..8),
    ) {
        let n = z.len().min(center.len());
        let out = soft_threshold(&z[..n], &center[..n], 0.0);
        // identity up to the center-relative round trip `c + (z - c)`
        for (o, zi) in out.iter().zip(&z[..n]) {
            prop_assert!((o - zi).abs() <= 1e-12 * zi.abs().max(1.0));
        }
    }

    #[test]
    fn auc_matches_pair_counting(
        benign in prop::collection::vec(0..40u8, 1..60),
        malicious in prop::collection::vec(0..40u8, 1..60),
    ) {
        // integer-derived scores force plenty of exact ties
        let b: Vec<f64> = benign.iter().map(|&v| v as f64 / 4.0).collect();
        let m: Vec<f64> = malicious.iter().map(|&v| v as f64 / 4.0).collect();
        let auc = roc_auc(&b, &m).unwrap();
        let mut pairs = 0.0;
        for &mv in &m {
            for &bv in &b {
                pairs += if mv > bv { 1.0 } else if mv == bv { 0.5 } else { 0.0 };
            }
        }
        let brute = pairs / (b.len() * m.len()) as f64;
        prop_assert!((auc - brute).abs() <= 1e-12);
    }

    #[test]
    fn roc_curve_is_monotone_from_origin_to_corner(
        benign in prop::collection::vec(-5.0..5.0f64, 1..40),
        malicious in prop::collection::vec(-5.0..5.0f64, 1..40),
    ) {
        let roc = roc_points(&benign, &malicious).unwrap();
        prop_assert_eq!(roc[0], (0.0, 0.0));
        prop_assert_eq!(*roc.last().unwrap(), (1.0, 1.0));
        for w in roc.windows(2) {
            prop_assert!(w[1].0 >= w[0].0);
            prop_assert!(w[1].1 >= w[0].1);
        }
        let auc = roc_auc(&benign, &malicious).unwrap();
        prop_assert!((0.0..=1.0).contains(&auc));
    }

    #[test]
    fn logits_sum_to_twice_the_threshold_and_agree_with_the_rule(
        score in 0.0..100.0f64,
        threshold in 1e-6..50.0f64,
    ) {
        let calib = ThresholdCalibration::from_threshold(threshold);
        let (benign, malicious) = logits_from_score(score, &calib);
        prop_assert!((benign + malicious - 2.0 * threshold).abs() < 1e-12);
        let label = classify_score(score, &calib);
        prop_assert_eq!(label == Label::Malicious, score >= threshold);
        prop_assert_eq!(label == Label::Malicious, malicious >= benign);
    }

    #[test]
    fn rmse_is_zero_only_on_equal_vectors((x, y) in vec_pair(12)) {
        let r = reconstruction_rmse(&x, &y).unwrap();
        prop_assert!(r >= 0.0);
        prop_assert_eq!(r == 0.0, x == y);
        // symmetry
        let r2 = reconstruction_rmse(&y, &x).unwrap();
        prop_assert_eq!(r.to_bits(), r2.to_bits());
    }

    #[test]
    fn normalizer_maps_fitted_extremes_to_the_unit_interval(
        rows in prop::collection::vec(prop::collection::vec(-100.0..100.0f64, 3), 2..30),
    ) {
        let mut norm = MinMaxNormalizer::from_first(&rows[0]).unwrap();
        for row in &rows[1..] {
            norm.update(row).unwrap();
        }
        for row in &rows {
            let out = norm.normalize(row).unwrap();
            for v in out {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
        }
        // fitted bounds hit the endpoints (the max only up to the
        // `(max - min) * (1 / (max - min))` rounding)
        let lo = norm.normalize(&norm.mins().to_vec()).unwrap();
        let hi = norm.normalize(&norm.maxs().to_vec()).unwrap();
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            prop_assert_eq!(*l, 0.0);
            if norm.maxs()[i] > norm.mins()[i] {
                prop_assert!((h - 1.0).abs() <= 1e-12);
            } else {
                prop_assert_eq!(*h, 0.0);
            }
        }
    }
}
