use serde::{Deserialize, Serialize};

use super::config::{ConstraintSpec, Objective};
use super::penalty::{static_penalty, ConstraintValues};
use super::{GaError, Result};
use crate::fem::{run_thermoelastic, ProblemConfig};
use crate::neural::{OperatorNet, StressSurrogate};
use crate::profile::{surrogate_input, GradationGenes, Profile2D, ProfileScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalSource {
    Surrogate,
    Fem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genes: GradationGenes,
    pub objective: f64,
    pub penalty: f64,
    /// `objective + penalty`, minimized.
    pub fitness: f64,
    pub eval_source: EvalSource,
    /// Raw stress surrogate output, Pa, whenever a surrogate was available.
    pub sigma_prediction: Option<f64>,
    pub sigma_e_max: f64,
    pub v_ca: f64,
    pub max_metal_temperature: Option<f64>,
}

impl Individual {
    pub fn is_feasible(&self) -> bool {
        self.penalty == 0.0
    }
}

/// Dispatch rule: surrogates unless the predicted stress falls below a
/// positive threshold.
pub fn uses_surrogate(prediction: f64, sigma_star: f64) -> bool {
    sigma_star <= 0.0 || prediction >= sigma_star
}

#[derive(Debug, Clone, Copy)]
pub struct Surrogates<'a> {
    pub stress: &'a StressSurrogate,
    /// Needed only when a temperature constraint is active.
    pub temperature: Option<&'a OperatorNet>,
}

/// Everything needed to score a genome.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    pub problem: &'a ProblemConfig,
    pub scheme: &'a ProfileScheme,
    pub spec: &'a ConstraintSpec,
    /// `None` scores every individual with FEM.
    pub surrogates: Option<Surrogates<'a>>,
}

impl<'a> Evaluator<'a> {
    pub fn fem_only(problem: &'a ProblemConfig, scheme: &'a ProfileScheme, spec: &'a ConstraintSpec) -> Self {
        Self { problem, scheme, spec, surrogates: None }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        self.scheme.validate()?;
        self.problem.validate()?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs();
        if !close(self.scheme.length, self.problem.length) || !close(self.scheme.height, self.problem.height) {
            return Err(GaError::InvalidConfig("profile scheme and problem describe different plates".into()));
        }
        if let Some(s) = &self.surrogates {
            if s.stress.input_dim() != self.scheme.input_dim() {
                return Err(GaError::MissingModel(format!(
                    "stress surrogate expects {} inputs, scheme produces {}",
                    s.stress.input_dim(),
                    self.scheme.input_dim()
                )));
            }
            match s.temperature {
                None if self.spec.needs_temperature() => {
                    return Err(GaError::MissingModel("temperature constraint needs an operator network".into()))
                }
                Some(op) if op.input_dim() != self.scheme.input_dim() => {
                    return Err(GaError::MissingModel(format!(
                        "operator network expects {} inputs, scheme produces {}",
                        op.input_dim(),
                        self.scheme.input_dim()
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn metal_max(profile: &Profile2D, temps: &[f64]) -> Option<f64> {
    profile.grid().iter().zip(temps).filter(|(phi, _)| **phi < 1.0).map(|(_, &t)| t).reduce(f64::max)
}

fn profile_nodes(profile: &Profile2D) -> Vec<[f64; 2]> {
    let mut pts = Vec::with_capacity(profile.grid().len());
    for i in 0..=profile.nx() {
        for j in 0..=profile.ny() {
            let (x, y) = profile.node_coords(i, j);
            pts.push([x, y]);
        }
    }
    pts
}

/// Scores one genome with the surrogate or FEM path chosen by [`uses_surrogate`].
///
/// On the surrogate path a negative stress prediction counts as zero stress;
/// `V_ca` is always the exact quadrature of the decoded profile.
pub fn hybrid_fitness(genes: &GradationGenes, ev: &Evaluator<'_>, sigma_star: f64) -> Result<Individual> {
    let (px, py) = ev.scheme.genes_to_profiles(genes)?;
    let profile = ev.scheme.genes_to_profile_2d(genes)?;
    let v_ca = profile.average();
    let input = surrogate_input(&px, &py);

    let prediction = match &ev.surrogates {
        Some(s) => Some(s.stress.predict(&input)?),
        None => None,
    };
    let (source, sigma, theta) = match (prediction, &ev.surrogates) {
        (Some(pred), Some(s)) if uses_surrogate(pred, sigma_star) => {
            let theta = match s.temperature {
                Some(op) if ev.spec.needs_temperature() => {
                    let temps = op.predict(&input, &profile_nodes(&profile))?;
                    metal_max(&profile, &temps)
                }
                _ => None,
            };
            (EvalSource::Surrogate, pred.max(0.0), theta)
        }
        _ => {
            let r = run_thermoelastic(&profile, ev.problem)?;
            (EvalSource::Fem, r.sigma_e_max, r.max_metal_temperature)
        }
    };
    let values = ConstraintValues { sigma_e_max: Some(sigma), v_ca: Some(v_ca), max_metal_temperature: theta };
    let penalty = static_penalty(&values, ev.spec)?;
    let objective = match ev.spec.objective {
        Objective::Stress => sigma,
        Objective::CeramicFraction => 100.0 * v_ca,
    };
    Ok(Individual {
        genes: genes.clone(),
        objective,
        penalty,
        fitness: objective + penalty,
        eval_source: source,
        sigma_prediction: prediction,
        sigma_e_max: sigma,
        v_ca,
        max_metal_temperature: theta,
    })
}
