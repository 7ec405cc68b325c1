//! Minimal dense feed-forward network engine: forward pass, backpropagation,
//! and seeded mini-batch training, shared by the reconstruction autoencoder
//! and the local-fit proxy classifier.
//!
//! All arithmetic is in f64; the finite-difference gradient checks in the
//! test suite depend on the extra precision.

mod train;

pub use train::{train, Optimizer, TrainConfig};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element-wise activation applied after a layer's affine transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    ReLU,
    Sigmoid,
    Tanh,
    Linear,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::ReLU => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    /// Derivative d(activation)/dz expressed through the activation output.
    ///
    /// Valid for every supported activation: ReLU output is positive exactly
    /// when its input is, and sigmoid/tanh derivatives are functions of the
    /// output alone.
    fn grad_from_output(self, a: f64) -> f64 {
        match self {
            Activation::ReLU => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Tanh => 1.0 - a * a,
            Activation::Linear => 1.0,
        }
    }
}

/// Training loss.
///
/// Mean squared error drives the autoencoder; binary cross-entropy (on a
/// sigmoid output unit) drives the proxy classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Loss {
    Mse,
    BinaryCrossEntropy,
}

/// Clamp bound keeping `ln` finite in the cross-entropy loss.
const BCE_EPS: f64 = 1e-12;

impl Loss {
    /// Per-sample loss value; lengths must already match.
    pub fn value(self, output: &[f64], target: &[f64]) -> f64 {
        let n = output.len() as f64;
        match self {
            Loss::Mse => {
                output
                    .iter()
                    .zip(target)
                    .map(|(a, t)| (a - t) * (a - t))
                    .sum::<f64>()
                    / n
            }
            Loss::BinaryCrossEntropy => {
                output
                    .iter()
                    .zip(target)
                    .map(|(&a, &t)| {
                        let a = a.clamp(BCE_EPS, 1.0 - BCE_EPS);
                        -(t * a.ln() + (1.0 - t) * (1.0 - a).ln())
                    })
                    .sum::<f64>()
                    / n
            }
        }
    }

    /// Gradient of the loss w.r.t. the network output, written into `out`.
    fn output_gradient(self, output: &[f64], target: &[f64], out: &mut [f64]) {
        let n = output.len() as f64;
        match self {
            Loss::Mse => {
                for ((g, &a), &t) in out.iter_mut().zip(output).zip(target) {
                    *g = 2.0 * (a - t) / n;
                }
            }
            Loss::BinaryCrossEntropy => {
                for ((g, &a), &t) in out.iter_mut().zip(output).zip(target) {
                    // Inside the clamp region the loss is constant in a.
                    *g = if a <= BCE_EPS || a >= 1.0 - BCE_EPS {
                        0.0
                    } else {
                        (-(t / a) + (1.0 - t) / (1.0 - a)) / n
                    };
                }
            }
        }
    }
}

/// Mean squared error between two equal-length vectors.
pub fn mse_loss(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    if y.len() != y_hat.len() {
        return Err(Error::ShapeMismatch(format!(
            "mse_loss lengths differ: {} vs {}",
            y.len(),
            y_hat.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::EmptyInput("mse_loss of zero-length vectors".into()));
    }
    Ok(Loss::Mse.value(y_hat, y))
}

/// One dense layer: `a = activation(W x + b)` with `W` row-major
/// `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    in_dim: usize,
    out_dim: usize,
    activation: Activation,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Layer {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::InvalidParameter("layer dims must be positive".into()));
        }
        if weights.len() != in_dim * out_dim || bias.len() != out_dim {
            return Err(Error::ShapeMismatch(format!(
                "layer {}x{} expects {} weights and {} biases, got {} and {}",
                out_dim,
                in_dim,
                in_dim * out_dim,
                out_dim,
                weights.len(),
                bias.len()
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            activation,
            weights,
            bias,
        })
    }

    /// Glorot-uniform initialised layer with zero bias.
    pub fn glorot<R: Rng + ?Sized>(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let weights = (0..in_dim * out_dim)
            .map(|_| rng.random_range(-limit..limit))
            .collect();
        Self::new(in_dim, out_dim, activation, weights, vec![0.0; out_dim])
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

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn forward_into(&self, input: &[f64], out: &mut [f64]) {
        debug_assert_eq!(input.len(), self.in_dim);
        debug_assert_eq!(out.len(), self.out_dim);
        for (o, slot) in out.iter_mut().enumerate() {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let z = self.bias[o] + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>();
            *slot = self.activation.apply(z);
        }
    }
}

/// A dense feed-forward network: an ordered stack of [`Layer`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    layers: Vec<Layer>,
}

impl NetworkModel {
    /// Builds a seeded Glorot-initialised network.
    ///
    /// `dims` lists layer widths input-first; `activations` has one entry per
    /// weight layer (`dims.len() - 1`).
    pub fn new(dims: &[usize], activations: &[Activation], seed: u64) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidParameter(
                "a network needs an input and an output dimension".into(),
            ));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter("layer dims must be positive".into()));
        }
        if activations.len() != dims.len() - 1 {
            return Err(Error::ShapeMismatch(format!(
                "expected {} activations for {} dims, got {}",
                dims.len() - 1,
                dims.len(),
                activations.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = dims
            .windows(2)
            .zip(activations)
            .map(|(w, &act)| Layer::glorot(w[0], w[1], act, &mut rng))
            .collect::<Result<_>>()?;
        Ok(Self { layers })
    }

    /// Assembles a network from explicit layers, checking the dimension chain.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("a network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::ShapeMismatch(format!(
                    "layer output dim {} feeds layer input dim {}",
                    pair[0].out_dim, pair[1].in_dim
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    /// Layer widths input-first, matching the `dims` given to [`Self::new`].
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_dim()];
        dims.extend(self.layers.iter().map(|l| l.out_dim));
        dims
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    pub fn params_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.weights.iter().all(|w| w.is_finite()) && l.bias.iter().all(|b| b.is_finite())
        })
    }

    /// Evaluates the network on one input vector.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut scratch = Scratch::for_model(self);
        self.forward_trace(x, &mut scratch);
        Ok(scratch.acts.last().expect("at least one layer").clone())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::ShapeMismatch(format!(
                "input has {} features, network expects {}",
                x.len(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Forward pass recording every layer's post-activation output.
    fn forward_trace(&self, x: &[f64], scratch: &mut Scratch) {
        let mut input = x;
        for (l, layer) in self.layers.iter().enumerate() {
            let (done, rest) = scratch.acts.split_at_mut(l);
            layer.forward_into(if l == 0 { input } else { &done[l - 1] }, &mut rest[0]);
            input = x; // silences the unused warning on the first iteration
        }
        let _ = input;
    }

    /// Gradients of the per-sample loss w.r.t. every weight and bias.
    pub fn backward(&self, x: &[f64], target: &[f64], loss: Loss) -> Result<Gradients> {
        self.check_input(x)?;
        if target.len() != self.output_dim() {
            return Err(Error::ShapeMismatch(format!(
                "target has {} entries, network outputs {}",
                target.len(),
                self.output_dim()
            )));
        }
        let mut scratch = Scratch::for_model(self);
        let mut grads = Gradients::zeros(self);
        self.forward_trace(x, &mut scratch);
        self.backward_accumulate(x, target, loss, &mut scratch, &mut grads);
        Ok(grads)
    }

    /// Backpropagates one sample, accumulating parameter gradients into
    /// `grads`. `scratch.acts` must hold the forward trace for `x`.
    fn backward_accumulate(
        &self,
        x: &[f64],
        target: &[f64],
        loss: Loss,
        scratch: &mut Scratch,
        grads: &mut Gradients,
    ) {
        let last = self.layers.len() - 1;
        loss.output_gradient(&scratch.acts[last], target, &mut scratch.deltas[last]);

        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            // delta currently holds dL/da for this layer; fold in act'.
            for (d, &a) in scratch.deltas[l].iter_mut().zip(&scratch.acts[l]) {
                *d *= layer.activation.grad_from_output(a);
            }
            let (below, here) = if l == 0 {
                (x, &scratch.deltas[l])
            } else {
                let (acts_lo, _) = scratch.acts.split_at(l);
                (acts_lo[l - 1].as_slice(), &scratch.deltas[l])
            };
            let g = &mut grads.layers[l];
            for o in 0..layer.out_dim {
                let d = here[o];
                g.d_bias[o] += d;
                let row = &mut g.d_weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (gw, &inp) in row.iter_mut().zip(below) {
                    *gw += d * inp;
                }
            }
            if l > 0 {
                let (lo, hi) = scratch.deltas.split_at_mut(l);
                let prev = &mut lo[l - 1];
                let here = &hi[0];
                prev.fill(0.0);
                for o in 0..layer.out_dim {
                    let d = here[o];
                    let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                    for (p, &w) in prev.iter_mut().zip(row) {
                        *p += w * d;
                    }
                }
            }
        }
    }
}

/// Per-layer parameter gradients, in the same layout as the model.
#[derive(Debug, Clone)]
pub struct Gradients {
    layers: Vec<LayerGrads>,
}

#[derive(Debug, Clone)]
struct LayerGrads {
    d_weights: Vec<f64>,
    d_bias: Vec<f64>,
}

impl Gradients {
    fn zeros(model: &NetworkModel) -> Self {
        Self {
            layers: model
                .layers
                .iter()
                .map(|l| LayerGrads {
                    d_weights: vec![0.0; l.weights.len()],
                    d_bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    fn reset(&mut self) {
        for l in &mut self.layers {
            l.d_weights.fill(0.0);
            l.d_bias.fill(0.0);
        }
    }

    fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.d_weights.iter_mut().for_each(|g| *g *= factor);
            l.d_bias.iter_mut().for_each(|g| *g *= factor);
        }
    }

    pub fn weight_grads(&self, layer: usize) -> &[f64] {
        &self.layers[layer].d_weights
    }

    pub fn bias_grads(&self, layer: usize) -> &[f64] {
        &self.layers[layer].d_bias
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.d_weights.iter().chain(&l.d_bias))
            .fold(0.0_f64, |m, g| m.max(g.abs()))
    }
}

/// Reusable per-sample forward/backward buffers.
struct Scratch {
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Scratch {
    fn for_model(model: &NetworkModel) -> Self {
        let sizes: Vec<usize> = model.layers.iter().map(|l| l.out_dim).collect();
        Self {
            acts: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            deltas: sizes.iter().map(|&s| vec![0.0; s]).collect(),
        }
    }
}

pub(crate) use internals::TrainAccess;

/// Crate-internal mutable access used by the optimizer.
mod internals {
    use super::*;

    pub trait TrainAccess {
        fn params_mut(&mut self) -> Vec<(&mut [f64], &mut [f64])>;
        fn grad_layers(grads: &Gradients) -> &[LayerGrads];
        fn step_scratch(&self) -> Scratch;
        fn run_backward(
            &self,
            x: &[f64],
            target: &[f64],
            loss: Loss,
            scratch: &mut Scratch,
            grads: &mut Gradients,
        );
        fn reset_grads(grads: &mut Gradients);
        fn scale_grads(grads: &mut Gradients, factor: f64);
    }

    impl TrainAccess for NetworkModel {
        fn params_mut(&mut self) -> Vec<(&mut [f64], &mut [f64])> {
            self.layers
                .iter_mut()
                .map(|l| (l.weights.as_mut_slice(), l.bias.as_mut_slice()))
                .collect()
        }

        fn grad_layers(grads: &Gradients) -> &[LayerGrads] {
            &grads.layers
        }

        fn step_scratch(&self) -> Scratch {
            Scratch::for_model(self)
        }

        fn run_backward(
            &self,
            x: &[f64],
            target: &[f64],
            loss: Loss,
            scratch: &mut Scratch,
            grads: &mut Gradients,
        ) {
            self.forward_trace(x, scratch);
            self.backward_accumulate(x, target, loss, scratch, grads);
        }

        fn reset_grads(grads: &mut Gradients) {
            grads.reset();
        }

        fn scale_grads(grads: &mut Gradients, factor: f64) {
            grads.scale(factor);
        }
    }

    impl LayerGrads {
        pub(crate) fn weight_slice(&self) -> &[f64] {
            &self.d_weights
        }

        pub(crate) fn bias_slice(&self) -> &[f64] {
            &self.d_bias
        }
    }

    pub(crate) fn forward_output(model: &NetworkModel, x: &[f64], scratch: &mut Scratch) -> f64 {
        model.forward_trace(x, scratch);
        scratch.acts.last().expect("non-empty")[0]
    }

    pub(crate) fn loss_of(model: &NetworkModel, x: &[f64], target: &[f64], loss: Loss, scratch: &mut Scratch) -> f64 {
        model.forward_trace(x, scratch);
        loss.value(scratch.acts.last().expect("non-empty"), target)
    }
}

#[cfg(test)]
mod tests;
