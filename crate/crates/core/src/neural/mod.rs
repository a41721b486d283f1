//! Feed-forward networks written against `matrixmultiply`, plus the two
//! surrogates used by the optimizer: a scalar peak-stress regressor and a
//! branch/trunk operator network for temperature fields.
//!
//! Batches are row-major `batch x features`. Training is single-threaded and
//! bit-deterministic for a fixed seed and dataset order.

mod adam;
mod dense;
mod history;
mod linalg;
mod metrics;
mod operator;
mod stress;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adam::Adam;
pub use dense::{Activation, DenseNet, Gradients, Layer};
pub use history::{EpochRecord, History};
pub use metrics::{mape, mse, r2_score};
pub use operator::{OperatorConfig, OperatorData, OperatorNet};
pub use stress::{StressConfig, StressSurrogate};

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("targets have zero variance")]
    ZeroVariance,
    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite parameters after {0}")]
    NonFinite(String),
    #[error("model file: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = NeuralError> = std::result::Result<T, E>;

/// One stage of a piecewise-constant learning-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainStage {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl TrainStage {
    pub fn new(learning_rate: f64, epochs: usize, batch_size: usize) -> Self {
        Self { learning_rate, epochs, batch_size }
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rate > 0.0 && self.learning_rate.is_finite() && self.epochs >= 1 && self.batch_size >= 1 {
            Ok(())
        } else {
            Err(NeuralError::InvalidConfig(format!("bad training stage {self:?}")))
        }
    }
}

pub(crate) fn validate_stages(stages: &[TrainStage]) -> Result<()> {
    if stages.is_empty() {
        return Err(NeuralError::InvalidConfig("empty schedule".into()));
    }
    stages.iter().try_for_each(TrainStage::validate)
}
