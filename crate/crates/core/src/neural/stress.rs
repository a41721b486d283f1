use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dense::{Activation, DenseNet};
use super::history::{EpochRecord, History};
use super::metrics::{mse, r2_score};
use super::{validate_stages, Adam, NeuralError, Result, TrainStage};
use crate::rng::Rng;

const STRESS_FORMAT: &str = "fgmopt.stress_surrogate.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressConfig {
    pub hidden: Vec<usize>,
    pub activation: Activation,
    /// Targets are divided by this before training, Pa.
    pub output_scale: f64,
    pub stages: Vec<TrainStage>,
}

impl StressConfig {
    /// 100 epochs at 1e-3, 50 at 1e-4, 200 at 5e-5, batch 32, scale 1e7.
    pub fn problem1() -> Self {
        Self {
            hidden: vec![256, 128, 64],
            activation: Activation::Relu,
            output_scale: 1e7,
            stages: vec![TrainStage::new(1e-3, 100, 32), TrainStage::new(1e-4, 50, 32), TrainStage::new(5e-5, 200, 32)],
        }
    }

    /// 100 epochs at 1e-3, 100 at 1e-4, 200 at 5e-5, batch 32, scale 1e6.
    pub fn problem2() -> Self {
        Self {
            hidden: vec![256, 128, 64],
            activation: Activation::Relu,
            output_scale: 1e6,
            stages: vec![TrainStage::new(1e-3, 100, 32), TrainStage::new(1e-4, 100, 32), TrainStage::new(5e-5, 200, 32)],
        }
    }
}

/// Peak effective stress regressor on concatenated `(phi_x, phi_y)` nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressSurrogate {
    format: String,
    pub net: DenseNet,
    pub output_scale: f64,
    /// Free-form description of the data and schedule the model was fitted with.
    #[serde(default)]
    pub training_fingerprint: String,
    #[serde(default)]
    pub build: String,
}

fn flatten(rows: &[Vec<f64>], width: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(rows.len() * width);
    for r in rows {
        if r.len() != width {
            return Err(NeuralError::DimensionMismatch { expected: width, got: r.len() });
        }
        out.extend_from_slice(r);
    }
    Ok(out)
}

fn forward_chunked(net: &DenseNet, x: &[f64], n: usize) -> Result<Vec<f64>> {
    const CHUNK: usize = 2048;
    let d = net.input_dim();
    let mut out = Vec::with_capacity(n * net.output_dim());
    for start in (0..n).step_by(CHUNK) {
        let end = (start + CHUNK).min(n);
        out.extend(net.forward_batch(&x[start * d..end * d], end - start)?);
    }
    Ok(out)
}

/// Minibatch Adam on batch-mean MSE over single-output rows.
pub(crate) fn train_regressor(
    net: &mut DenseNet,
    x: &[f64],
    y: &[f64],
    test: Option<(&[f64], &[f64])>,
    stages: &[TrainStage],
    rng: &mut Rng,
) -> Result<History> {
    validate_stages(stages)?;
    let (d, n) = (net.input_dim(), y.len());
    if n == 0 {
        return Err(NeuralError::EmptyDataset);
    }
    if x.len() != n * d {
        return Err(NeuralError::DimensionMismatch { expected: n * d, got: x.len() });
    }
    let shapes: Vec<usize> = net.layers().iter().flat_map(|l| [l.weights.len(), l.bias.len()]).collect();
    let mut adam = Adam::new(&shapes);
    let mut order: Vec<usize> = (0..n).collect();
    let mut history = History::default();
    let mut epoch = 0;
    let (mut xb, mut yb) = (Vec::new(), Vec::new());
    for (si, stage) in stages.iter().enumerate() {
        for _ in 0..stage.epochs {
            order.shuffle(rng);
            for batch in order.chunks(stage.batch_size) {
                xb.clear();
                yb.clear();
                for &i in batch {
                    xb.extend_from_slice(&x[i * d..(i + 1) * d]);
                    yb.push(y[i]);
                }
                let (_, grads) = net.mse_gradients(&xb, &yb, batch.len())?;
                adam.step(net.param_slices_mut(), &grads.slices(), stage.learning_rate);
            }
            epoch += 1;
            if !net.is_finite() {
                return Err(NeuralError::NonFinite(format!("epoch {epoch}")));
            }
            let pred = forward_chunked(net, x, n)?;
            let (test_mse, test_r2) = match test {
                Some((tx, ty)) if !ty.is_empty() => {
                    let p = forward_chunked(net, tx, ty.len())?;
                    (Some(mse(&p, ty)?), r2_score(&p, ty).ok())
                }
                _ => (None, None),
            };
            history.records.push(EpochRecord {
                epoch,
                stage: si,
                learning_rate: stage.learning_rate,
                train_mse: mse(&pred, y)?,
                test_mse,
                train_r2: r2_score(&pred, y).unwrap_or(f64::NAN),
                test_r2,
            });
        }
    }
    Ok(history)
}

impl StressSurrogate {
    pub fn new(input_dim: usize, config: &StressConfig, rng: &mut Rng) -> Result<Self> {
        if !(config.output_scale > 0.0) {
            return Err(NeuralError::InvalidConfig("output scale must be positive".into()));
        }
        let mut sizes = vec![input_dim];
        sizes.extend(&config.hidden);
        sizes.push(1);
        Ok(Self {
            format: STRESS_FORMAT.into(),
            net: DenseNet::new(&sizes, config.activation, Activation::Identity, rng)?,
            output_scale: config.output_scale,
            training_fingerprint: String::new(),
            build: crate::BUILD_FINGERPRINT.into(),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.net.input_dim()
    }

    /// Raw prediction in Pa; the linear head can return negative values.
    pub fn predict(&self, input: &[f64]) -> Result<f64> {
        Ok(self.net.forward(input)?[0] * self.output_scale)
    }

    pub fn predict_many(&self, inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
        let x = flatten(inputs, self.input_dim())?;
        Ok(forward_chunked(&self.net, &x, inputs.len())?.into_iter().map(|v| v * self.output_scale).collect())
    }

    /// Sets the output bias to the mean scaled target, so a fresh network
    /// starts at the data mean instead of near zero.
    pub fn init_output_bias(&mut self, sigma: &[f64]) {
        if sigma.is_empty() {
            return;
        }
        let mean = sigma.iter().sum::<f64>() / sigma.len() as f64 / self.output_scale;
        let last = self.net.layers_mut().last_mut().expect("network has layers");
        last.bias[0] = mean;
    }

    /// Fits on stresses in Pa; history MSE is in units of `output_scale^2`.
    pub fn train(
        &mut self,
        inputs: &[Vec<f64>],
        sigma: &[f64],
        test: Option<(&[Vec<f64>], &[f64])>,
        stages: &[TrainStage],
        rng: &mut Rng,
    ) -> Result<History> {
        if inputs.len() != sigma.len() {
            return Err(NeuralError::DimensionMismatch { expected: inputs.len(), got: sigma.len() });
        }
        let x = flatten(inputs, self.input_dim())?;
        let y: Vec<f64> = sigma.iter().map(|s| s / self.output_scale).collect();
        let test = match test {
            Some((tx, ty)) => {
                if tx.len() != ty.len() {
                    return Err(NeuralError::DimensionMismatch { expected: tx.len(), got: ty.len() });
                }
                Some((flatten(tx, self.input_dim())?, ty.iter().map(|s| s / self.output_scale).collect::<Vec<_>>()))
            }
            None => None,
        };
        train_regressor(&mut self.net, &x, &y, test.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice())), stages, rng)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| NeuralError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| NeuralError::Format(e.to_string()))?;
        if m.format != STRESS_FORMAT {
            return Err(NeuralError::Format(format!("expected {STRESS_FORMAT}, found {}", m.format)));
        }
        m.net.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
