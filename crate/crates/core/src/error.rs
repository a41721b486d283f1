use thiserror::Error;

use crate::fem::FemError;
use crate::ga::GaError;
use crate::neural::NeuralError;
use crate::pipeline::PipelineError;
use crate::profile::ProfileError;

/// Crate-level error, one variant per subsystem.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
