//! Optimization of two-phase functionally graded plates under thermoelastic
//! loading.
//!
//! The crate is organized as a pipeline:
//!
//! - [`profile`] generates bounded-ratio gradation profiles and decodes GA genes;
//! - [`fem`] solves the one-way coupled steady thermal + linear elastic problem
//!   on structured 9-node quadrilateral meshes;
//! - [`neural`] holds the from-scratch dense network, the scalar stress
//!   surrogate and the branch/trunk operator network for temperature fields;
//! - [`ga`] is the real-coded genetic algorithm with hybrid surrogate/FEM fitness;
//! - [`pipeline`] generates datasets and wires complete experiments.

pub mod fem;
pub mod ga;
pub mod neural;
pub mod pipeline;
pub mod profile;
pub mod rng;

mod error;

pub use error::{Error, Result};

/// Build fingerprint embedded in every result bundle and model file.
pub const BUILD_FINGERPRINT: &str = concat!(env!("CARGO_PKG_NAME"), "-", env!("CARGO_PKG_VERSION"));
