use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dense::{Activation, DenseNet, Gradients};
use super::history::{EpochRecord, History};
use super::linalg::gemm;
use super::metrics::{mse, r2_score};
use super::{validate_stages, Adam, NeuralError, Result, TrainStage};
use crate::rng::Rng;

const OPERATOR_FORMAT: &str = "fgmopt.operator_net.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub branch_hidden: Vec<usize>,
    pub branch_activation: Activation,
    pub trunk_hidden: Vec<usize>,
    pub trunk_activation: Activation,
    /// Width of the shared latent basis.
    pub latent: usize,
    /// Temperatures are divided by this before training, degC.
    pub temperature_scale: f64,
    /// `batch_size` counts (sample, point) pairs.
    pub stages: Vec<TrainStage>,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            branch_hidden: vec![200],
            branch_activation: Activation::Relu,
            trunk_hidden: vec![200, 200, 200],
            trunk_activation: Activation::Tanh,
            latent: 250,
            temperature_scale: 500.0,
            stages: vec![
                TrainStage::new(1e-3, 10, 1024),
                TrainStage::new(1e-4, 20, 1024),
                TrainStage::new(1e-4, 20, 256),
                TrainStage::new(1e-5, 10, 256),
            ],
        }
    }
}

/// Gradation inputs and temperatures sampled on a shared point set.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorData {
    pub inputs: Vec<Vec<f64>>,
    /// Physical coordinates, m.
    pub points: Vec<[f64; 2]>,
    /// `targets[s][p]` is the temperature of sample `s` at `points[p]`.
    pub targets: Vec<Vec<f64>>,
}

impl OperatorData {
    pub fn validate(&self, input_dim: usize) -> Result<()> {
        if self.inputs.is_empty() || self.points.is_empty() {
            return Err(NeuralError::EmptyDataset);
        }
        if self.targets.len() != self.inputs.len() {
            return Err(NeuralError::DimensionMismatch { expected: self.inputs.len(), got: self.targets.len() });
        }
        for x in &self.inputs {
            if x.len() != input_dim {
                return Err(NeuralError::DimensionMismatch { expected: input_dim, got: x.len() });
            }
        }
        for t in &self.targets {
            if t.len() != self.points.len() {
                return Err(NeuralError::DimensionMismatch { expected: self.points.len(), got: t.len() });
            }
        }
        Ok(())
    }
}

/// Branch/trunk operator network: `T(x, y) = scale * sum_i f_i(input) g_i(x / L, y / H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorNet {
    format: String,
    pub branch: DenseNet,
    pub trunk: DenseNet,
    pub temperature_scale: f64,
    pub length: f64,
    pub height: f64,
    #[serde(default)]
    pub training_fingerprint: String,
    #[serde(default)]
    pub build: String,
}

impl OperatorNet {
    pub fn new(input_dim: usize, length: f64, height: f64, config: &OperatorConfig, rng: &mut Rng) -> Result<Self> {
        if !(config.temperature_scale > 0.0 && length > 0.0 && height > 0.0) {
            return Err(NeuralError::InvalidConfig("scale and plate dimensions must be positive".into()));
        }
        let sizes = |first: usize, hidden: &[usize]| {
            let mut s = vec![first];
            s.extend(hidden);
            s.push(config.latent);
            s
        };
        let mut branch =
            DenseNet::new(&sizes(input_dim, &config.branch_hidden), config.branch_activation, Activation::Identity, rng)?;
        // Keeps the initial dot product O(1) instead of O(sqrt(latent)).
        let shrink = 1.0 / (config.latent as f64).sqrt();
        branch.layers_mut().last_mut().expect("branch has layers").weights.iter_mut().for_each(|w| *w *= shrink);
        Ok(Self {
            format: OPERATOR_FORMAT.into(),
            branch,
            trunk: DenseNet::new(&sizes(2, &config.trunk_hidden), config.trunk_activation, Activation::Identity, rng)?,
            temperature_scale: config.temperature_scale,
            length,
            height,
            training_fingerprint: String::new(),
            build: crate::BUILD_FINGERPRINT.into(),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.branch.input_dim()
    }

    pub fn latent(&self) -> usize {
        self.branch.output_dim()
    }

    fn trunk_input(&self, points: &[[f64; 2]]) -> Vec<f64> {
        points.iter().flat_map(|p| [p[0] / self.length, p[1] / self.height]).collect()
    }

    /// Temperatures of one gradation at `points`, degC.
    pub fn predict(&self, input: &[f64], points: &[[f64; 2]]) -> Result<Vec<f64>> {
        Ok(self.predict_many(&[input.to_vec()], points)?.pop().expect("one sample"))
    }

    pub fn predict_many(&self, inputs: &[Vec<f64>], points: &[[f64; 2]]) -> Result<Vec<Vec<f64>>> {
        let (d, c, p) = (self.input_dim(), self.latent(), points.len());
        let mut x = Vec::with_capacity(inputs.len() * d);
        for r in inputs {
            if r.len() != d {
                return Err(NeuralError::DimensionMismatch { expected: d, got: r.len() });
            }
            x.extend_from_slice(r);
        }
        let g = self.trunk.forward_batch(&self.trunk_input(points), p)?;
        let mut out = Vec::with_capacity(inputs.len());
        const CHUNK: usize = 256;
        for start in (0..inputs.len()).step_by(CHUNK) {
            let s = (inputs.len() - start).min(CHUNK);
            let f = self.branch.forward_batch(&x[start * d..(start + s) * d], s)?;
            let mut t = vec![0.0; s * p];
            gemm(s, c, p, &f, false, &g, true, 0.0, &mut t);
            out.extend(t.chunks_exact(p.max(1)).map(|row| row.iter().map(|v| v * self.temperature_scale).collect()));
        }
        Ok(out)
    }

    /// Loss (scaled units) and gradients for a block of whole samples.
    pub(crate) fn batch_gradients(
        &self,
        x: &[f64],
        y_scaled: &[f64],
        samples: usize,
        trunk_x: &[f64],
        n_points: usize,
    ) -> Result<(f64, Gradients, Gradients)> {
        let c = self.latent();
        let fb = self.branch.forward_tape(x, samples)?;
        let gt = self.trunk.forward_tape(trunk_x, n_points)?;
        let (f, g) = (fb.output(), gt.output());
        let mut dt = vec![0.0; samples * n_points];
        gemm(samples, c, n_points, f, false, g, true, 0.0, &mut dt);
        let n = dt.len() as f64;
        let mut loss = 0.0;
        for (v, y) in dt.iter_mut().zip(y_scaled) {
            let r = *v - y;
            loss += r * r;
            *v = 2.0 * r / n;
        }
        let mut df = vec![0.0; samples * c];
        gemm(samples, n_points, c, &dt, false, g, false, 0.0, &mut df);
        let mut dg = vec![0.0; n_points * c];
        gemm(n_points, samples, c, &dt, true, f, false, 0.0, &mut dg);
        let mut gb = Gradients::zeros(&self.branch);
        let mut gtr = Gradients::zeros(&self.trunk);
        self.branch.backward(&fb, &df, &mut gb, false);
        self.trunk.backward(&gt, &dg, &mut gtr, false);
        Ok((loss / n, gb, gtr))
    }

    fn metrics(&self, data: &OperatorData) -> Result<(f64, Option<f64>)> {
        let pred = self.predict_many(&data.inputs, &data.points)?;
        let p: Vec<f64> = pred.into_iter().flatten().map(|v| v / self.temperature_scale).collect();
        let y: Vec<f64> = data.targets.iter().flatten().map(|v| v / self.temperature_scale).collect();
        Ok((mse(&p, &y)?, r2_score(&p, &y).ok()))
    }

    /// Minibatch Adam over both subnetworks. Each epoch visits every
    /// (sample, point) pair once, in blocks of `s` samples by `q` points with
    /// `s = q = round(sqrt(batch_size))`, so the trunk only runs on the block's
    /// points.
    pub fn train(
        &mut self,
        train: &OperatorData,
        test: Option<&OperatorData>,
        stages: &[TrainStage],
        rng: &mut Rng,
    ) -> Result<History> {
        validate_stages(stages)?;
        train.validate(self.input_dim())?;
        if let Some(t) = test {
            t.validate(self.input_dim())?;
        }
        let (d, p) = (self.input_dim(), train.points.len());
        let trunk_all = self.trunk_input(&train.points);
        let shapes: Vec<usize> = self
            .branch
            .layers()
            .iter()
            .chain(self.trunk.layers())
            .flat_map(|l| [l.weights.len(), l.bias.len()])
            .collect();
        let mut adam = Adam::new(&shapes);
        let mut order: Vec<usize> = (0..train.inputs.len()).collect();
        let mut point_order: Vec<usize> = (0..p).collect();
        let mut history = History::default();
        let mut epoch = 0;
        let (mut xb, mut yb, mut tb) = (Vec::new(), Vec::new(), Vec::new());
        for (si, stage) in stages.iter().enumerate() {
            let side = ((stage.batch_size as f64).sqrt().round() as usize).max(1);
            for _ in 0..stage.epochs {
                order.shuffle(rng);
                for batch in order.chunks(side) {
                    xb.clear();
                    for &i in batch {
                        xb.extend_from_slice(&train.inputs[i]);
                    }
                    debug_assert_eq!(xb.len(), batch.len() * d);
                    point_order.shuffle(rng);
                    for points in point_order.chunks(side) {
                        tb.clear();
                        for &j in points {
                            tb.extend_from_slice(&trunk_all[2 * j..2 * j + 2]);
                        }
                        yb.clear();
                        for &i in batch {
                            yb.extend(points.iter().map(|&j| train.targets[i][j] / self.temperature_scale));
                        }
                        let (_, gb, gt) = self.batch_gradients(&xb, &yb, batch.len(), &tb, points.len())?;
                        let mut grads = gb.slices();
                        grads.extend(gt.slices());
                        let mut params = self.branch.param_slices_mut();
                        params.extend(self.trunk.param_slices_mut());
                        adam.step(params, &grads, stage.learning_rate);
                    }
                }
                epoch += 1;
                if !(self.branch.is_finite() && self.trunk.is_finite()) {
                    return Err(NeuralError::NonFinite(format!("epoch {epoch}")));
                }
                let (train_mse, train_r2) = self.metrics(train)?;
                let (test_mse, test_r2) = match test {
                    Some(t) => {
                        let (m, r) = self.metrics(t)?;
                        (Some(m), r)
                    }
                    None => (None, None),
                };
                history.records.push(EpochRecord {
                    epoch,
                    stage: si,
                    learning_rate: stage.learning_rate,
                    train_mse,
                    test_mse,
                    train_r2: train_r2.unwrap_or(f64::NAN),
                    test_r2,
                });
            }
        }
        Ok(history)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| NeuralError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| NeuralError::Format(e.to_string()))?;
        if m.format != OPERATOR_FORMAT {
            return Err(NeuralError::Format(format!("expected {OPERATOR_FORMAT}, found {}", m.format)));
        }
        m.branch.validate()?;
        m.trunk.validate()?;
        if m.trunk.input_dim() != 2 || m.trunk.output_dim() != m.branch.output_dim() {
            return Err(NeuralError::Format("branch and trunk widths disagree".into()));
        }
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
