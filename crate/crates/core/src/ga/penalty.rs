use serde::{Deserialize, Serialize};

use super::config::ConstraintSpec;
use super::{GaError, Result};

/// Quantities a constraint can refer to.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintValues {
    /// Pa.
    pub sigma_e_max: Option<f64>,
    /// Fraction in `[0, 1]`.
    pub v_ca: Option<f64>,
    pub max_metal_temperature: Option<f64>,
}

/// `sum_j w_j max(0, g_j)^2` over the normalized violations
/// `V_ca / V* - 1`, `theta / theta_max - 1` and `sigma / sigma_a - 1`.
pub fn static_penalty(values: &ConstraintValues, spec: &ConstraintSpec) -> Result<f64> {
    let [wv, wt, ws] = spec.weights();
    let term = |limit: Option<f64>, value: Option<f64>, weight: f64, name: &'static str| -> Result<f64> {
        let Some(limit) = limit else { return Ok(0.0) };
        let v = value.ok_or(GaError::MissingSummary(name))?;
        let g = (v / limit - 1.0).max(0.0);
        Ok(weight * g * g)
    };
    Ok(term(spec.v_star, values.v_ca, wv, "v_ca")?
        + term(spec.theta_max, values.max_metal_temperature, wt, "max_metal_temperature")?
        + term(spec.sigma_allow, values.sigma_e_max, ws, "sigma_e_max")?)
}
