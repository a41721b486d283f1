//! One-way coupled thermoelastic finite-element analysis of graded plates.
//!
//! A steady conduction solve gives the nodal temperature, which then drives a
//! linear elastic solve through the thermal stress modulus `beta`. Both fields
//! use 9-node biquadratic quadrilaterals and 3x3 Gauss quadrature; phase
//! properties are blended at each Gauss point from the bilinearly interpolated
//! volume fraction.
//!
//! Assembly loops over elements in index order and over Gauss points in
//! `(eta, xi)` lexicographic order; there is no parallel reduction inside one
//! solve, so results are bit-reproducible.

mod analysis;
pub mod band;
mod config;
mod elastic;
mod export;
mod material;
pub mod mesh;
mod stress;
mod thermal;
pub mod verify;

use thiserror::Error;

pub use analysis::{run_thermoelastic, temperature_field, FemResult, FemSummary};
pub use config::{
    AnalysisMode, BcTarget, Component, DisplacementBc, EdgeFunction, EdgeTraction, MechBcSet, ProblemConfig,
    StressMeasure, ThermalBc, ThermalBcSet, ThermalLoad,
};
pub use elastic::{element_point_stresses, gauss_point_stresses, solve_elastic, ElasticSolution, GaussStress};
pub use export::{write_field_csv, FieldKind};
pub use material::{material_at, Material, MaterialPair, PointMaterial};
pub use mesh::{Corner, Edge, Mesh};
pub use stress::{effective_stress, SymTensor3};
pub use thermal::{solve_thermal, ThermalSolution};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("non-positive conductivity {0} at a Gauss point")]
    NonPositiveConductivity(f64),
    #[error("metal volume fraction {0} outside [0, 1]")]
    PhiOutOfRange(f64),
    #[error("invalid FEM configuration: {0}")]
    InvalidConfig(String),
    #[error("linear solve residual {0:.3e} exceeds tolerance")]
    Residual(f64),
}

/// Relative residual above which a solve is reported as failed.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
