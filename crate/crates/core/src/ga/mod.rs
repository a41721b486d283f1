//! Real-coded genetic algorithm over gradation genes.
//!
//! Fitness is minimized: `objective + static penalty`. Each individual is
//! scored either by the surrogates or by a full FEM solve, chosen per
//! individual from the stress surrogate's prediction and the threshold
//! `sigma_star`. Variation uses bounded SBX and polynomial mutation; the best
//! `elite_count` individuals pass to the next generation untouched.

mod config;
mod evolve;
mod fitness;
mod operators;
mod penalty;

use thiserror::Error;

pub use config::{ConstraintSpec, EtaSign, GaConfig, Objective};
pub use evolve::{evolve, DispatchEntry, GenerationRecord, RunRecord, Termination};
pub use fitness::{hybrid_fitness, uses_surrogate, EvalSource, Evaluator, Individual, Surrogates};
pub use operators::{eta_schedule, polynomial_mutation, sbx_crossover, tournament_select};
pub use penalty::{static_penalty, ConstraintValues};

use crate::fem::FemError;
use crate::neural::NeuralError;
use crate::profile::ProfileError;

#[derive(Debug, Error)]
pub enum GaError {
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error("constraint needs {0}, which the evaluation did not produce")]
    MissingSummary(&'static str),
    #[error("missing model: {0}")]
    MissingModel(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = GaError> = std::result::Result<T, E>;
