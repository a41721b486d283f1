use serde::{Deserialize, Serialize};

use super::{GaError, Result};

/// Quantity being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Peak effective stress in Pa.
    Stress,
    /// Average ceramic fraction in percent.
    CeramicFraction,
}

impl Objective {
    /// Penalty weight scale: 100 MPa for stress, 100 percentage points for `V_ca`.
    pub fn default_weight(self) -> f64 {
        match self {
            Objective::Stress => 1e8,
            Objective::CeramicFraction => 100.0,
        }
    }

    /// 0.001 MPa for stress, 1 percentage point for `V_ca`.
    pub fn default_stall_tolerance(self) -> f64 {
        match self {
            Objective::Stress => 1e3,
            Objective::CeramicFraction => 1.0,
        }
    }
}

/// Sign of the exponent in `base [1 + (1 - exp(+-g / 100)) / 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaSign {
    /// `exp(g / 100)`: indices shrink and the search widens with `g`.
    #[default]
    Positive,
    /// `exp(-g / 100)`: indices grow and the search narrows with `g`.
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub objective: Objective,
    /// Upper bound on the average ceramic fraction, as a fraction.
    #[serde(default)]
    pub v_star: Option<f64>,
    /// Upper bound on temperature over nodes that contain metal.
    #[serde(default)]
    pub theta_max: Option<f64>,
    /// Allowable peak effective stress, Pa.
    #[serde(default)]
    pub sigma_allow: Option<f64>,
    /// Per-constraint weights; `None` uses the objective's default.
    #[serde(default)]
    pub weight_v: Option<f64>,
    #[serde(default)]
    pub weight_theta: Option<f64>,
    #[serde(default)]
    pub weight_sigma: Option<f64>,
}

impl ConstraintSpec {
    pub fn unconstrained(objective: Objective) -> Self {
        Self { objective, v_star: None, theta_max: None, sigma_allow: None, weight_v: None, weight_theta: None, weight_sigma: None }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: Option<f64>, name: &str| match v {
            Some(v) if !(v > 0.0 && v.is_finite()) => Err(GaError::InvalidConfig(format!("{name} must be positive"))),
            _ => Ok(()),
        };
        positive(self.v_star, "v_star")?;
        positive(self.theta_max, "theta_max")?;
        positive(self.sigma_allow, "sigma_allow")?;
        positive(self.weight_v, "weight_v")?;
        positive(self.weight_theta, "weight_theta")?;
        positive(self.weight_sigma, "weight_sigma")?;
        Ok(())
    }

    pub fn weights(&self) -> [f64; 3] {
        let d = self.objective.default_weight();
        [self.weight_v.unwrap_or(d), self.weight_theta.unwrap_or(d), self.weight_sigma.unwrap_or(d)]
    }

    /// Same constraints with every weight multiplied by `factor`.
    pub fn scaled_weights(&self, factor: f64) -> Self {
        let [wv, wt, ws] = self.weights();
        Self { weight_v: Some(wv * factor), weight_theta: Some(wt * factor), weight_sigma: Some(ws * factor), ..self.clone() }
    }

    pub fn needs_temperature(&self) -> bool {
        self.theta_max.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub tournament_size: usize,
    /// Probability that a selected pair is recombined at all.
    pub crossover_probability: f64,
    /// Per-gene exchange probability inside SBX.
    pub sbx_gene_probability: f64,
    pub eta_c_base: f64,
    pub eta_m_base: f64,
    pub eta_sign: EtaSign,
    /// Per-gene mutation probability.
    pub mutation_probability: f64,
    pub elite_count: usize,
    pub min_generations: usize,
    pub stall_generations: usize,
    /// Fitness units; `None` uses the objective's default.
    pub stall_tolerance: Option<f64>,
    /// Hard cap on generations.
    pub max_generations: usize,
    /// Hybrid threshold, Pa; zero sends every individual to the surrogates.
    pub sigma_star: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 200,
            tournament_size: 4,
            crossover_probability: 0.9,
            sbx_gene_probability: 0.5,
            eta_c_base: 2.0,
            eta_m_base: 10.0,
            eta_sign: EtaSign::Positive,
            mutation_probability: 0.4,
            elite_count: 2,
            min_generations: 50,
            stall_generations: 10,
            stall_tolerance: None,
            max_generations: 300,
            sigma_star: 0.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn problem1() -> Self {
        Self { mutation_probability: 0.3, sigma_star: 0.0, ..Self::default() }
    }

    pub fn problem2() -> Self {
        Self { mutation_probability: 0.4, sigma_star: 50e6, ..Self::default() }
    }

    pub fn for_problem(id: &str) -> Option<Self> {
        match id {
            "problem1" => Some(Self::problem1()),
            "problem2" => Some(Self::problem2()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GaError::InvalidConfig(m.into()));
        if self.population_size < 2 {
            return bad("population_size must be at least 2");
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return bad("tournament_size must be in 1..=population_size");
        }
        if self.elite_count >= self.population_size {
            return bad("elite_count must be below population_size");
        }
        if self.stall_generations == 0 || self.max_generations == 0 {
            return bad("stall_generations and max_generations must be positive");
        }
        if self.min_generations > self.max_generations {
            return bad("min_generations exceeds max_generations");
        }
        for (p, name) in [
            (self.crossover_probability, "crossover_probability"),
            (self.sbx_gene_probability, "sbx_gene_probability"),
            (self.mutation_probability, "mutation_probability"),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GaError::InvalidConfig(format!("{name} must be in [0, 1]")));
            }
        }
        if !(self.eta_c_base > 0.0 && self.eta_m_base > 0.0) {
            return bad("eta bases must be positive");
        }
        if !(self.sigma_star >= 0.0) {
            return bad("sigma_star must be non-negative");
        }
        if matches!(self.stall_tolerance, Some(t) if !(t >= 0.0)) {
            return bad("stall_tolerance must be non-negative");
        }
        Ok(())
    }
}
