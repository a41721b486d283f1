use serde::{Deserialize, Serialize};

use crate::profile::Profile2D;

use super::config::{ProblemConfig, ThermalLoad};
use super::elastic::{gauss_point_stresses, solve_elastic, GaussStress};
use super::mesh::Mesh;
use super::thermal::{solve_thermal, ThermalSolution};
use super::FemError;

/// Complete output of one thermoelastic analysis.
#[derive(Debug, Clone)]
pub struct FemResult {
    pub mesh: Mesh,
    /// Absolute nodal temperature.
    pub temperature: Vec<f64>,
    /// Interleaved `[u1, u2]` per node.
    pub displacement: Vec<f64>,
    pub gauss: Vec<GaussStress>,
    /// Largest Gauss-point effective stress, Pa.
    pub sigma_e_max: f64,
    pub sigma_e_max_at: [f64; 2],
    /// Domain-average ceramic fraction.
    pub v_ca: f64,
    /// Highest temperature over profile nodes that contain any metal.
    pub max_metal_temperature: Option<f64>,
    pub thermal: Option<ThermalSolution>,
    pub elastic_residual: f64,
}

/// Scalar digest of a [`FemResult`] for logs and JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemSummary {
    pub problem: String,
    pub sigma_e_max: f64,
    pub sigma_e_max_at: [f64; 2],
    pub v_ca: f64,
    pub max_metal_temperature: Option<f64>,
    pub max_temperature: f64,
    pub min_temperature: f64,
    pub thermal_residual: Option<f64>,
    pub heat_imbalance: Option<f64>,
    pub elastic_residual: f64,
}

impl FemResult {
    pub fn summary(&self, problem: &str) -> FemSummary {
        let (lo, hi) = self.temperature.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
        FemSummary {
            problem: problem.to_string(),
            sigma_e_max: self.sigma_e_max,
            sigma_e_max_at: self.sigma_e_max_at,
            v_ca: self.v_ca,
            max_metal_temperature: self.max_metal_temperature,
            max_temperature: hi,
            min_temperature: lo,
            thermal_residual: self.thermal.as_ref().map(|t| t.residual),
            heat_imbalance: self.thermal.as_ref().map(|t| t.heat_imbalance()),
            elastic_residual: self.elastic_residual,
        }
    }

    /// Temperature at the nodes of a profile grid, laid out like its values.
    pub fn temperature_on_grid(&self, grid: &Profile2D) -> Vec<f64> {
        let mut out = Vec::with_capacity((grid.nx() + 1) * (grid.ny() + 1));
        for i in 0..=grid.nx() {
            for j in 0..=grid.ny() {
                let (x, y) = grid.node_coords(i, j);
                out.push(self.mesh.interpolate(&self.temperature, x, y));
            }
        }
        out
    }
}

fn check_geometry(profile: &Profile2D, config: &ProblemConfig) -> Result<(), FemError> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
    if !close(profile.length(), config.length) || !close(profile.height(), config.height) {
        return Err(FemError::InvalidConfig(format!(
            "profile domain {}x{} does not match plate {}x{}",
            profile.length(),
            profile.height(),
            config.length,
            config.height
        )));
    }
    if let Some(&bad) = profile.grid().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(FemError::PhiOutOfRange(1.0 - bad));
    }
    Ok(())
}

/// Nodal temperature for the problem's thermal load, with the conduction
/// solution when one was needed.
pub fn temperature_field(
    mesh: &Mesh,
    profile: &Profile2D,
    config: &ProblemConfig,
) -> Result<(Vec<f64>, Option<ThermalSolution>), FemError> {
    match &config.thermal {
        ThermalLoad::UniformChange { delta } => Ok((vec![config.reference_temperature + delta; mesh.n_nodes()], None)),
        ThermalLoad::Conduction { .. } => {
            let sol = solve_thermal(mesh, profile, config)?;
            Ok((sol.temperature.clone(), Some(sol)))
        }
    }
}

/// Thermal solve (when needed), elastic solve, and stress recovery.
pub fn run_thermoelastic(profile: &Profile2D, config: &ProblemConfig) -> Result<FemResult, FemError> {
    config.validate()?;
    check_geometry(profile, config)?;
    let mesh = Mesh::new(config.nx, config.ny, config.length, config.height);
    let (temperature, thermal) = temperature_field(&mesh, profile, config)?;
    let elastic = solve_elastic(&mesh, profile, config, &temperature)?;
    let gauss = gauss_point_stresses(&mesh, profile, config, &temperature, &elastic.displacement);
    let worst = gauss
        .iter()
        .fold(None::<&GaussStress>, |best, g| match best {
            Some(b) if b.effective >= g.effective => Some(b),
            _ => Some(g),
        })
        .expect("mesh has Gauss points");
    if !worst.effective.is_finite() {
        return Err(FemError::SingularSystem("non-finite stress".into()));
    }
    let mut result = FemResult {
        sigma_e_max: worst.effective,
        sigma_e_max_at: [worst.x, worst.y],
        v_ca: profile.average(),
        max_metal_temperature: None,
        mesh,
        temperature,
        displacement: elastic.displacement,
        gauss,
        thermal,
        elastic_residual: elastic.residual,
    };
    let grid_t = result.temperature_on_grid(profile);
    result.max_metal_temperature = profile
        .grid()
        .iter()
        .zip(&grid_t)
        .filter(|(phi, _)| **phi < 1.0)
        .map(|(_, &t)| t)
        .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t))));
    Ok(result)
}
