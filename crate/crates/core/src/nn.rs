//! Minimal dense-network numerics.
//!
//! Everything the detector and the attacks need from a neural network is
//! covered by four primitives: forward evaluation of dense layers, the RMSE
//! reconstruction score, exact chain-rule gradients (both for parameters and
//! for the input), and a plain SGD step. A central finite-difference
//! gradient is provided as the independent test oracle.
//!
//! All numerics are `f64`; the gradient-check tolerances assume it.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// RMSE is non-differentiable at zero error; below this value its gradient
/// is defined as the zero vector (the subgradient at the minimum).
pub const RMSE_GRAD_EPS: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NnError {
    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid hidden size {hidden} for input dimension {input}")]
    InvalidHiddenSize { hidden: usize, input: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed in terms of the activation output.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }
}

/// A dense layer `y = activation(W x + b)` with row-major weights of shape
/// `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn from_parts(
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        activation: Activation,
    ) -> Result<Self, NnError> {
        if weights.len() != in_dim * out_dim {
            return Err(NnError::ShapeMismatch {
                expected: in_dim * out_dim,
                got: weights.len(),
            });
        }
        if biases.len() != out_dim {
            return Err(NnError::ShapeMismatch {
                expected: out_dim,
                got: biases.len(),
            });
        }
        if !weights.iter().chain(&biases).all(|v| v.is_finite()) {
            return Err(NnError::NonFinite("layer parameters"));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weights,
            biases,
            activation,
        })
    }

    /// Seeded uniform initialization in `[-1/sqrt(in_dim), 1/sqrt(in_dim)]`.
    pub fn random<R: Rng>(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut R) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let weights = (0..in_dim * out_dim)
            .map(|_| rng.gen_range(-bound..=bound))
            .collect();
        Self {
            in_dim,
            out_dim,
            weights: weights,
            biases: vec![0.0; out_dim],
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    #[inline]
    fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.in_dim + col]
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NnError> {
        if input.len() != self.in_dim {
            return Err(NnError::ShapeMismatch {
                expected: self.in_dim,
                got: input.len(),
            });
        }
        let mut out = Vec::with_capacity(self.out_dim);
        for i in 0..self.out_dim {
            let mut z = self.biases[i];
            for (j, &x) in input.iter().enumerate() {
                z += self.weight(i, j) * x;
            }
            out.push(self.activation.apply(z));
        }
        Ok(out)
    }

    fn apply_gradients(&mut self, grads: &LayerGrads, learning_rate: f64) -> Result<(), NnError> {
        sgd_step(&mut self.weights, &grads.weights, learning_rate)?;
        sgd_step(&mut self.biases, &grads.biases, learning_rate)
    }
}

/// Encoder/decoder pair reconstructing to the input dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder {
    encoder: DenseLayer,
    decoder: DenseLayer,
}

impl Autoencoder {
    pub fn new(encoder: DenseLayer, decoder: DenseLayer) -> Result<Self, NnError> {
        if decoder.in_dim != encoder.out_dim {
            return Err(NnError::ShapeMismatch {
                expected: encoder.out_dim,
                got: decoder.in_dim,
            });
        }
        if decoder.out_dim != encoder.in_dim {
            return Err(NnError::ShapeMismatch {
                expected: encoder.in_dim,
                got: decoder.out_dim,
            });
        }
        Ok(Self { encoder, decoder })
    }

    /// Seeded sigmoid autoencoder with a compressed hidden layer.
    pub fn random<R: Rng>(input_dim: usize, hidden_dim: usize, rng: &mut R) -> Result<Self, NnError> {
        if hidden_dim == 0 || (input_dim > 1 && hidden_dim >= input_dim) {
            return Err(NnError::InvalidHiddenSize {
                hidden: hidden_dim,
                input: input_dim,
            });
        }
        let encoder = DenseLayer::random(input_dim, hidden_dim, Activation::Sigmoid, rng);
        let decoder = DenseLayer::random(hidden_dim, input_dim, Activation::Sigmoid, rng);
        Self::new(encoder, decoder)
    }

    pub fn input_dim(&self) -> usize {
        self.encoder.in_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.encoder.out_dim
    }

    pub fn encoder(&self) -> &DenseLayer {
        &self.encoder
    }

    pub fn decoder(&self) -> &DenseLayer {
        &self.decoder
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, NnError> {
        let hidden = self.encoder.forward(x)?;
        self.decoder.forward(&hidden)
    }

    /// One SGD step on every weight and bias.
    pub fn apply_gradients(&mut self, grads: &GradientBundle, learning_rate: f64) -> Result<(), NnError> {
        self.encoder.apply_gradients(&grads.encoder, learning_rate)?;
        self.decoder.apply_gradients(&grads.decoder, learning_rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Gradients of `RMSE(x, ae(x))` with respect to every parameter and to the
/// input itself (the input appears both as network input and as the
/// reconstruction target).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBundle {
    pub encoder: LayerGrads,
    pub decoder: LayerGrads,
    pub input: Vec<f64>,
}

impl GradientBundle {
    fn zeros(ae: &Autoencoder) -> Self {
        Self {
            encoder: LayerGrads {
                weights: vec![0.0; ae.encoder.weights.len()],
                biases: vec![0.0; ae.encoder.biases.len()],
            },
            decoder: LayerGrads {
                weights: vec![0.0; ae.decoder.weights.len()],
                biases: vec![0.0; ae.decoder.biases.len()],
            },
            input: vec![0.0; ae.input_dim()],
        }
    }

    /// Scales every gradient entry, used when chaining a reconstruction node
    /// into a larger composition.
    pub fn scaled(mut self, factor: f64) -> Self {
        for g in self
            .encoder
            .weights
            .iter_mut()
            .chain(self.encoder.biases.iter_mut())
            .chain(self.decoder.weights.iter_mut())
            .chain(self.decoder.biases.iter_mut())
            .chain(self.input.iter_mut())
        {
            *g *= factor;
        }
        self
    }
}

/// Result of one differentiated reconstruction pass.
#[derive(Debug, Clone)]
pub struct ReconstructionGrads {
    pub rmse: f64,
    pub output: Vec<f64>,
    pub grads: GradientBundle,
}

/// `sqrt(sum((x_i - x_hat_i)^2) / n)`.
pub fn reconstruction_rmse(x: &[f64], x_hat: &[f64]) -> Result<f64, NnError> {
    if x.is_empty() {
        return Err(NnError::EmptyInput);
    }
    if x.len() != x_hat.len() {
        return Err(NnError::ShapeMismatch {
            expected: x.len(),
            got: x_hat.len(),
        });
    }
    let sum: f64 = x.iter().zip(x_hat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sum / x.len() as f64).sqrt())
}

/// Gradients of `RMSE(x, x_hat)` with respect to both arguments; zero at the
/// guarded minimum.
pub fn rmse_gradients(x: &[f64], x_hat: &[f64]) -> Result<(Vec<f64>, Vec<f64>), NnError> {
    let rmse = reconstruction_rmse(x, x_hat)?;
    let n = x.len() as f64;
    if rmse <= RMSE_GRAD_EPS {
        return Ok((vec![0.0; x.len()], vec![0.0; x.len()]));
    }
    let dx: Vec<f64> = x
        .iter()
        .zip(x_hat)
        .map(|(a, b)| (a - b) / (n * rmse))
        .collect();
    let dxh: Vec<f64> = dx.iter().map(|g| -g).collect();
    Ok((dx, dxh))
}

/// Full chain-rule pass through `RMSE(x, ae(x))`: parameter gradients for
/// training, total input gradient for attacks, plus the score and the
/// reconstruction so callers never need a second forward pass.
pub fn backprop(ae: &Autoencoder, x: &[f64]) -> Result<ReconstructionGrads, NnError> {
    if x.len() != ae.input_dim() {
        return Err(NnError::ShapeMismatch {
            expected: ae.input_dim(),
            got: x.len(),
        });
    }
    let hidden = ae.encoder.forward(x)?;
    let output = ae.decoder.forward(&hidden)?;
    let rmse = reconstruction_rmse(x, &output)?;
    if rmse <= RMSE_GRAD_EPS {
        return Ok(ReconstructionGrads {
            rmse,
            output,
            grads: GradientBundle::zeros(ae),
        });
    }

    let n = x.len() as f64;
    let mut grads = GradientBundle::zeros(ae);

    // delta at the decoder output: dRMSE/dz_out
    let mut delta_out = Vec::with_capacity(output.len());
    for (i, &y) in output.iter().enumerate() {
        let upstream = (y - x[i]) / (n * rmse);
        delta_out.push(upstream * ae.decoder.activation.derivative_from_output(y));
    }
    for i in 0..ae.decoder.out_dim {
        for (j, &h) in hidden.iter().enumerate() {
            grads.decoder.weights[i * ae.decoder.in_dim + j] = delta_out[i] * h;
        }
        grads.decoder.biases[i] = delta_out[i];
    }

    // delta at the encoder output
    let mut delta_hidden = Vec::with_capacity(hidden.len());
    for (j, &h) in hidden.iter().enumerate() {
        let mut e = 0.0;
        for i in 0..ae.decoder.out_dim {
            e += delta_out[i] * ae.decoder.weight(i, j);
        }
        delta_hidden.push(e * ae.encoder.activation.derivative_from_output(h));
    }
    for j in 0..ae.encoder.out_dim {
        for (k, &xv) in x.iter().enumerate() {
            grads.encoder.weights[j * ae.encoder.in_dim + k] = delta_hidden[j] * xv;
        }
        grads.encoder.biases[j] = delta_hidden[j];
    }

    // total input gradient: direct RMSE-target term plus the path through
    // the network
    for k in 0..x.len() {
        let direct = (x[k] - output[k]) / (n * rmse);
        let mut through = 0.0;
        for j in 0..ae.encoder.out_dim {
            through += delta_hidden[j] * ae.encoder.weight(j, k);
        }
        grads.input[k] = direct + through;
    }

    Ok(ReconstructionGrads { rmse, output, grads })
}

/// Parameter gradients of `RMSE(x, ae(x))`.
pub fn backprop_params(ae: &Autoencoder, x: &[f64]) -> Result<GradientBundle, NnError> {
    backprop(ae, x).map(|r| r.grads)
}

/// `d RMSE(x, ae(x)) / dx`.
pub fn input_gradient(ae: &Autoencoder, x: &[f64]) -> Result<Vec<f64>, NnError> {
    backprop(ae, x).map(|r| r.grads.input)
}

/// `theta <- theta - lr * grad`, elementwise.
pub fn sgd_step(params: &mut [f64], grads: &[f64], learning_rate: f64) -> Result<(), NnError> {
    if params.len() != grads.len() {
        return Err(NnError::ShapeMismatch {
            expected: params.len(),
            got: grads.len(),
        });
    }
    if !grads.iter().all(|g| g.is_finite()) {
        return Err(NnError::NonFinite("gradient"));
    }
    for (p, g) in params.iter_mut().zip(grads) {
        *p -= learning_rate * g;
    }
    Ok(())
}

/// Central finite differences `(f(x + h e_i) - f(x - h e_i)) / 2h`; the
/// independent oracle every analytic gradient is checked against.
pub fn finite_difference_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let plus = f(&probe);
        probe[i] = x[i] - h;
        let minus = f(&probe);
        probe[i] = x[i];
        grad.push((plus - minus) / (2.0 * h));
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn identity_layer(dim: usize) -> DenseLayer {
        let mut w = vec![0.0; dim * dim];
        for i in 0..dim {
            w[i * dim + i] = 1.0;
        }
        DenseLayer::from_parts(dim, dim, w, vec![0.0; dim], Activation::Identity).unwrap()
    }

    #[test]
    fn dense_forward_identity_passthrough() {
        let layer = identity_layer(2);
        assert_eq!(layer.forward(&[0.2, 0.7]).unwrap(), vec![0.2, 0.7]);
    }

    #[test]
    fn dense_forward_sigmoid_of_zero_is_half() {
        let layer =
            DenseLayer::from_parts(3, 2, vec![0.0; 6], vec![0.0; 2], Activation::Sigmoid).unwrap();
        assert_eq!(layer.forward(&[1.0, -4.0, 2.5]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn dense_forward_hand_arithmetic() {
        let layer = DenseLayer::from_parts(
            2,
            2,
            vec![2.0, 0.0, 0.0, 3.0],
            vec![1.0, 1.0],
            Activation::Identity,
        )
        .unwrap();
        assert_eq!(layer.forward(&[1.0, 1.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn dense_forward_shape_error() {
        let layer = identity_layer(2);
        assert_eq!(
            layer.forward(&[1.0]).unwrap_err(),
            NnError::ShapeMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn dense_forward_sigmoid_stays_in_open_unit_interval() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..50 {
            let layer = DenseLayer::random(4, 3, Activation::Sigmoid, &mut rng);
            // keep pre-activations small enough that sigmoid stays strictly
            // inside (0,1) in double precision
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-8.0..8.0)).collect();
            for y in layer.forward(&x).unwrap() {
                assert!(y > 0.0 && y < 1.0);
            }
        }
    }

    #[test]
    fn autoencoder_identity_reconstructs_exactly() {
        let ae = Autoencoder::new(identity_layer(3), identity_layer(3)).unwrap();
        let x = vec![0.4, -1.2, 9.0];
        assert_eq!(ae.forward(&x).unwrap(), x);
    }

    #[test]
    fn autoencoder_zero_weight_sigmoid_outputs() {
        // 2 -> 1 -> 2 with all-zero weights: hidden = sigmoid(0) = 0.5,
        // output = sigmoid(0 * 0.5 + 0) = 0.5 per component.
        let encoder =
            DenseLayer::from_parts(2, 1, vec![0.0, 0.0], vec![0.0], Activation::Sigmoid).unwrap();
        let decoder =
            DenseLayer::from_parts(1, 2, vec![0.0, 0.0], vec![0.0, 0.0], Activation::Sigmoid).unwrap();
        let ae = Autoencoder::new(encoder, decoder).unwrap();
        assert_eq!(ae.forward(&[0.9, -0.1]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn autoencoder_trains_to_reconstruct_constant_input() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mut ae = Autoencoder::random(3, 2, &mut rng).unwrap();
        let target = [0.3, 0.7, 0.5];
        // RMSE gradients do not vanish near the optimum, so finish with a
        // small step size to settle inside the tolerance.
        for &(lr, steps) in &[(0.5, 4000), (1e-4, 4000)] {
            for _ in 0..steps {
                let grads = backprop_params(&ae, &target).unwrap();
                ae.apply_gradients(&grads, lr).unwrap();
            }
        }
        let out = ae.forward(&target).unwrap();
        for (o, t) in out.iter().zip(&target) {
            assert!((o - t).abs() < 1e-3, "output {o} vs target {t}");
        }
    }

    #[test]
    fn rmse_examples() {
        assert_eq!(reconstruction_rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let r = reconstruction_rmse(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!((r - 0.5_f64.sqrt()).abs() < 1e-15);
        assert_eq!(reconstruction_rmse(&[3.0], &[1.0]).unwrap(), 2.0);
        assert_eq!(reconstruction_rmse(&[], &[]).unwrap_err(), NnError::EmptyInput);
    }

    #[test]
    fn rmse_gradient_matches_hand_differentiation() {
        // f(x) = RMSE(x, 0) at x = [3, 4]: gradient = x / (n * RMSE) with
        // RMSE = sqrt(12.5); cross-checked against central differences
        let rmse = 12.5_f64.sqrt();
        let (dx, _) = rmse_gradients(&[3.0, 4.0], &[0.0, 0.0]).unwrap();
        assert!((dx[0] - 3.0 / (2.0 * rmse)).abs() < 1e-15);
        assert!((dx[1] - 4.0 / (2.0 * rmse)).abs() < 1e-15);

        let f = |x: &[f64]| reconstruction_rmse(x, &[0.0, 0.0]).unwrap();
        let fd = finite_difference_gradient(&f, &[3.0, 4.0], 1e-6);
        for (a, n) in dx.iter().zip(&fd) {
            assert!((a - n).abs() / n.abs() < 1e-7);
        }
    }

    #[test]
    fn rmse_gradient_zero_at_guarded_minimum() {
        let (dx, dxh) = rmse_gradients(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(dx, vec![0.0, 0.0]);
        assert_eq!(dxh, vec![0.0, 0.0]);
    }

    #[test]
    fn backprop_zero_at_exact_reconstruction() {
        // 1 -> 1 -> 1 identity with unit weights reconstructs exactly.
        let enc = DenseLayer::from_parts(1, 1, vec![1.0], vec![0.0], Activation::Identity).unwrap();
        let dec = DenseLayer::from_parts(1, 1, vec![1.0], vec![0.0], Activation::Identity).unwrap();
        let ae = Autoencoder::new(enc, dec).unwrap();
        let r = backprop(&ae, &[2.0]).unwrap();
        assert_eq!(r.rmse, 0.0);
        assert_eq!(r.grads.encoder.weights, vec![0.0]);
        assert_eq!(r.grads.decoder.weights, vec![0.0]);
        assert_eq!(r.grads.input, vec![0.0]);
    }

    fn relative_error(a: f64, b: f64) -> f64 {
        let denom = a.abs().max(b.abs()).max(1e-8);
        (a - b).abs() / denom
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..5 {
            let ae = Autoencoder::random(4, 3, &mut rng).unwrap();
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
            let analytic = backprop(&ae, &x).unwrap();
            assert!(analytic.rmse > 1e-6);

            // input gradient
            let fd = finite_difference_gradient(
                |p| reconstruction_rmse(p, &ae.forward(p).unwrap()).unwrap(),
                &x,
                1e-6,
            );
            for (a, f) in analytic.grads.input.iter().zip(&fd) {
                assert!(relative_error(*a, *f) <= 1e-5, "input grad {a} vs fd {f}");
            }

            // parameter gradients, perturbing one weight at a time
            let enc_w = ae.encoder().weights().to_vec();
            let fd_enc = finite_difference_gradient(
                |w| {
                    let enc = DenseLayer::from_parts(
                        4,
                        3,
                        w.to_vec(),
                        ae.encoder().biases().to_vec(),
                        Activation::Sigmoid,
                    )
                    .unwrap();
                    let probe = Autoencoder::new(enc, ae.decoder().clone()).unwrap();
                    reconstruction_rmse(&x, &probe.forward(&x).unwrap()).unwrap()
                },
                &enc_w,
                1e-6,
            );
            for (a, f) in analytic.grads.encoder.weights.iter().zip(&fd_enc) {
                assert!(relative_error(*a, *f) <= 1e-5, "encoder grad {a} vs fd {f}");
            }

            let dec_b = ae.decoder().biases().to_vec();
            let fd_dec_b = finite_difference_gradient(
                |b| {
                    let dec = DenseLayer::from_parts(
                        3,
                        4,
                        ae.decoder().weights().to_vec(),
                        b.to_vec(),
                        Activation::Sigmoid,
                    )
                    .unwrap();
                    let probe = Autoencoder::new(ae.encoder().clone(), dec).unwrap();
                    reconstruction_rmse(&x, &probe.forward(&x).unwrap()).unwrap()
                },
                &dec_b,
                1e-6,
            );
            for (a, f) in analytic.grads.decoder.biases.iter().zip(&fd_dec_b) {
                assert!(relative_error(*a, *f) <= 1e-5, "decoder bias grad {a} vs fd {f}");
            }
        }
    }

    #[test]
    fn sgd_step_examples() {
        let mut p = vec![1.0];
        sgd_step(&mut p, &[2.0], 0.1).unwrap();
        assert!((p[0] - 0.8).abs() < 1e-15);

        let mut q = vec![4.0, -2.0];
        sgd_step(&mut q, &[0.0, 0.0], 0.3).unwrap();
        assert_eq!(q, vec![4.0, -2.0]);

        let mut r = vec![1.0];
        assert_eq!(
            sgd_step(&mut r, &[f64::NAN], 0.1).unwrap_err(),
            NnError::NonFinite("gradient")
        );
    }

    #[test]
    fn sgd_zero_learning_rate_is_identity() {
        let mut p = vec![0.25, -3.5, 7.0];
        let orig = p.clone();
        sgd_step(&mut p, &[1.0, 2.0, -9.0], 0.0).unwrap();
        assert_eq!(p, orig);
    }

    #[test]
    fn sgd_converges_on_quadratic() {
        // f(t) = (t - 3)^2, gradient 2(t - 3); fixed point is the minimum.
        let mut t = 10.0;
        for _ in 0..200 {
            let g = 2.0 * (t - 3.0);
            sgd_step(std::slice::from_mut(&mut t), &[g], 0.1).unwrap();
        }
        assert!((t - 3.0).abs() < 1e-6);
    }

    #[test]
    fn finite_difference_examples() {
        // linear function recovers its slope
        let fd = finite_difference_gradient(|x| 2.0 * x[0] - 5.0 * x[1], &[1.0, 1.0], 1e-6);
        assert!((fd[0] - 2.0).abs() < 1e-8);
        assert!((fd[1] + 5.0).abs() < 1e-8);

        // f(x) = x^2 at 3
        let fd = finite_difference_gradient(|x| x[0] * x[0], &[3.0], 1e-6);
        assert!((fd[0] - 6.0).abs() < 1e-6);
    }
}
