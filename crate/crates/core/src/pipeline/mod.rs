//! Dataset generation, surrogate training on stored datasets, and complete
//! optimization experiments for the shipped problems.

mod dataset;
mod experiment;
mod training;

use thiserror::Error;

pub use dataset::{
    generate_dataset, load_dataset, scheme_for, sha256_hex, split_indices, Dataset, DatasetManifest, FileEntry, Sample,
};
pub use experiment::{run_experiment, Case, ExperimentConfig, ExperimentOutcome, ModelPaths, ResultBundle};
pub use training::{operator_data, stress_xy, train_operator, train_stress};

use crate::fem::FemError;
use crate::ga::GaError;
use crate::neural::NeuralError;
use crate::profile::ProfileError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown problem '{0}'")]
    UnknownProblem(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("checksum mismatch for {0}")]
    Checksum(String),
    #[error("missing model: {0}")]
    MissingModel(String),
    #[error("sample {index} failed after {attempts} attempts: {last}")]
    SolveFailure { index: usize, attempts: u32, last: FemError },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;
