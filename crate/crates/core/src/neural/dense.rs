use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::linalg::gemm;
use super::{NeuralError, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, v: &mut [f64]) {
        match self {
            Activation::Relu => v.iter_mut().for_each(|x| *x = x.max(0.0)),
            Activation::Tanh => v.iter_mut().for_each(|x| *x = x.tanh()),
            Activation::Identity => {}
        }
    }

    /// Multiplies `grad` by the derivative, expressed through the output `y`.
    #[inline]
    fn backprop(self, y: &[f64], grad: &mut [f64]) {
        match self {
            Activation::Relu => grad.iter_mut().zip(y).for_each(|(g, &y)| {
                if y <= 0.0 {
                    *g = 0.0
                }
            }),
            Activation::Tanh => grad.iter_mut().zip(y).for_each(|(g, &y)| *g *= 1.0 - y * y),
            Activation::Identity => {}
        }
    }
}

/// Affine map followed by an activation: `y_k = chi(sum_j w_kj x_j + b_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub n_in: usize,
    pub n_out: usize,
    pub activation: Activation,
    /// `n_in x n_out`, row-major, so `weights[j * n_out + k] = w_kj`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    /// He-style uniform initialization on `[-sqrt(6 / n_in), sqrt(6 / n_in)]`, zero bias.
    pub fn he_uniform(n_in: usize, n_out: usize, activation: Activation, rng: &mut Rng) -> Self {
        let limit = (6.0 / n_in as f64).sqrt();
        let weights = (0..n_in * n_out).map(|_| rng.gen_range(-limit..limit)).collect();
        Self { n_in, n_out, activation, weights, bias: vec![0.0; n_out] }
    }

    fn forward(&self, x: &[f64], batch: usize) -> Vec<f64> {
        let mut y: Vec<f64> = Vec::with_capacity(batch * self.n_out);
        for _ in 0..batch {
            y.extend_from_slice(&self.bias);
        }
        gemm(batch, self.n_in, self.n_out, x, false, &self.weights, false, 1.0, &mut y);
        self.activation.apply(&mut y);
        y
    }
}

/// Per-layer gradients, shaped like the network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros(net: &DenseNet) -> Self {
        Self {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            bias: net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    /// Slices in the same order as [`DenseNet::param_slices_mut`].
    pub fn slices(&self) -> Vec<&[f64]> {
        self.weights.iter().zip(&self.bias).flat_map(|(w, b)| [w.as_slice(), b.as_slice()]).collect()
    }
}

/// Activations recorded by a forward pass, for backpropagation.
#[derive(Debug, Clone)]
pub struct Tape {
    batch: usize,
    /// `acts[0]` is the input, `acts[l + 1]` the output of layer `l`.
    acts: Vec<Vec<f64>>,
}

impl Tape {
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("tape holds the input")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    layers: Vec<Layer>,
}

impl DenseNet {
    /// Network with layer widths `sizes` (input first), `hidden` activation on
    /// every layer but the last, which uses `output`.
    pub fn new(sizes: &[usize], hidden: Activation, output: Activation, rng: &mut Rng) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(NeuralError::InvalidConfig(format!("layer sizes {sizes:?}")));
        }
        let n = sizes.len() - 1;
        let layers = (0..n)
            .map(|i| Layer::he_uniform(sizes[i], sizes[i + 1], if i + 1 == n { output } else { hidden }, rng))
            .collect();
        Ok(Self { layers })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        let net = Self { layers };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(NeuralError::InvalidConfig("network has no layers".into()));
        }
        for (i, l) in self.layers.iter().enumerate() {
            if l.weights.len() != l.n_in * l.n_out || l.bias.len() != l.n_out {
                return Err(NeuralError::InvalidConfig(format!("layer {i} parameter shapes")));
            }
            if i > 0 && self.layers[i - 1].n_out != l.n_in {
                return Err(NeuralError::DimensionMismatch { expected: self.layers[i - 1].n_out, got: l.n_in });
            }
        }
        Ok(())
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].n_out
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weights.iter().chain(&l.bias).all(|v| v.is_finite()))
    }

    /// Weight and bias slices, layer by layer.
    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()]).collect()
    }

    fn check_input(&self, x: &[f64], batch: usize) -> Result<()> {
        let expected = batch * self.input_dim();
        if x.len() != expected {
            return Err(NeuralError::DimensionMismatch { expected, got: x.len() });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.forward_batch(x, 1)
    }

    pub fn forward_batch(&self, x: &[f64], batch: usize) -> Result<Vec<f64>> {
        self.check_input(x, batch)?;
        let mut cur = x.to_vec();
        for l in &self.layers {
            cur = l.forward(&cur, batch);
        }
        Ok(cur)
    }

    pub fn forward_tape(&self, x: &[f64], batch: usize) -> Result<Tape> {
        self.check_input(x, batch)?;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for l in &self.layers {
            let next = l.forward(acts.last().expect("non-empty"), batch);
            acts.push(next);
        }
        Ok(Tape { batch, acts })
    }

    /// Accumulates parameter gradients for `dL/d(output)` into `grads`;
    /// returns `dL/d(input)` when asked.
    pub fn backward(&self, tape: &Tape, d_out: &[f64], grads: &mut Gradients, want_input: bool) -> Option<Vec<f64>> {
        let batch = tape.batch;
        let mut delta = d_out.to_vec();
        for (i, l) in self.layers.iter().enumerate().rev() {
            l.activation.backprop(&tape.acts[i + 1], &mut delta);
            let x = &tape.acts[i];
            gemm(l.n_in, batch, l.n_out, x, true, &delta, false, 1.0, &mut grads.weights[i]);
            let gb = &mut grads.bias[i];
            for row in delta.chunks_exact(l.n_out) {
                for (g, d) in gb.iter_mut().zip(row) {
                    *g += d;
                }
            }
            if i > 0 || want_input {
                let mut dx = vec![0.0; batch * l.n_in];
                gemm(batch, l.n_out, l.n_in, &delta, false, &l.weights, true, 0.0, &mut dx);
                delta = dx;
            } else {
                return None;
            }
        }
        Some(delta)
    }

    /// Batch-mean squared error over all outputs and its exact gradients.
    pub fn mse_gradients(&self, x: &[f64], y: &[f64], batch: usize) -> Result<(f64, Gradients)> {
        let tape = self.forward_tape(x, batch)?;
        let out = tape.output();
        if y.len() != out.len() {
            return Err(NeuralError::DimensionMismatch { expected: out.len(), got: y.len() });
        }
        let n = out.len() as f64;
        let mut loss = 0.0;
        let d_out: Vec<f64> = out
            .iter()
            .zip(y)
            .map(|(p, t)| {
                let r = p - t;
                loss += r * r;
                2.0 * r / n
            })
            .collect();
        let mut grads = Gradients::zeros(self);
        self.backward(&tape, &d_out, &mut grads, false);
        Ok((loss / n, grads))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn identity_relu_layer() {
        let layer = Layer {
            n_in: 2,
            n_out: 2,
            activation: Activation::Relu,
            weights: vec![1.0, 0.0, 0.0, 1.0],
            bias: vec![0.0, 0.0],
        };
        let net = DenseNet::from_layers(vec![layer]).unwrap();
        assert_eq!(net.forward(&[-1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
    }

    #[test]
    fn zero_weights_return_bias() {
        let layer =
            Layer { n_in: 3, n_out: 2, activation: Activation::Identity, weights: vec![0.0; 6], bias: vec![0.5, -2.0] };
        let net = DenseNet::from_layers(vec![layer]).unwrap();
        assert_eq!(net.forward(&[4.0, 5.0, 6.0]).unwrap(), vec![0.5, -2.0]);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let mut rng = seeded(1);
        let net = DenseNet::new(&[3, 4, 1], Activation::Relu, Activation::Identity, &mut rng).unwrap();
        assert!(matches!(net.forward(&[1.0, 2.0]), Err(NeuralError::DimensionMismatch { .. })));
        let a = Layer::he_uniform(3, 4, Activation::Relu, &mut rng);
        let b = Layer::he_uniform(5, 1, Activation::Identity, &mut rng);
        assert!(DenseNet::from_layers(vec![a, b]).is_err());
    }

    #[test]
    fn zero_residual_gives_zero_gradient() {
        let mut rng = seeded(2);
        let net = DenseNet::new(&[3, 5, 2], Activation::Tanh, Activation::Identity, &mut rng).unwrap();
        let x = [0.1, -0.3, 0.7, 0.2, 0.2, -0.9];
        let y = net.forward_batch(&x, 2).unwrap();
        let (loss, g) = net.mse_gradients(&x, &y, 2).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.slices().iter().all(|s| s.iter().all(|&v| v == 0.0)));
    }
}
