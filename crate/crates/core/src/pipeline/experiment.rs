use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::dataset::scheme_for;
use super::{PipelineError, Result};
use crate::fem::{run_thermoelastic, write_field_csv, FieldKind, ProblemConfig};
use crate::ga::{evolve, ConstraintSpec, Evaluator, GaConfig, Objective, RunRecord, Surrogates};
use crate::neural::{OperatorNet, StressSurrogate};

/// Optimization statement applied to a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Minimize peak stress.
    Unconstrained,
    /// Same as `Unconstrained`.
    Case1,
    /// Minimize peak stress with `V_ca <= v_star`.
    Case2,
    /// Minimize peak stress with metal temperature `<= theta_max`.
    Case3,
    /// Minimize `V_ca` with peak stress `<= sigma_allow` and metal temperature `<= theta_max`.
    Case4,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelPaths {
    #[serde(default)]
    pub stress: Option<PathBuf>,
    #[serde(default)]
    pub temperature: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: String,
    pub case: Case,
    /// Fields overriding the problem's default [`GaConfig`].
    #[serde(default)]
    pub ga: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub models: ModelPaths,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Score every individual with FEM and ignore `models`.
    #[serde(default)]
    pub fem_only: bool,
    /// Defaults to 0.15.
    #[serde(default)]
    pub v_star: Option<f64>,
    /// Defaults to 275.
    #[serde(default)]
    pub theta_max: Option<f64>,
    /// Pa; defaults to 150 MPa.
    #[serde(default)]
    pub sigma_allow: Option<f64>,
    /// Fields overriding the case's default [`ConstraintSpec`] weights.
    #[serde(default)]
    pub weights: Option<[Option<f64>; 3]>,
}

impl ExperimentConfig {
    /// Reads a config file; relative model paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: Self = serde_json::from_str(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.models.stress, &mut cfg.models.temperature].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn problem_config(&self) -> Result<ProblemConfig> {
        ProblemConfig::builtin(&self.problem).ok_or_else(|| PipelineError::UnknownProblem(self.problem.clone()))
    }

    pub fn constraint_spec(&self) -> Result<ConstraintSpec> {
        if self.problem == "problem1" && !matches!(self.case, Case::Unconstrained | Case::Case1) {
            return Err(PipelineError::InvalidConfig("problem1 supports only the unconstrained case".into()));
        }
        let v_star = Some(self.v_star.unwrap_or(0.15));
        let theta_max = Some(self.theta_max.unwrap_or(275.0));
        let sigma_allow = Some(self.sigma_allow.unwrap_or(150e6));
        let mut spec = match self.case {
            Case::Unconstrained | Case::Case1 => ConstraintSpec::unconstrained(Objective::Stress),
            Case::Case2 => ConstraintSpec { v_star, ..ConstraintSpec::unconstrained(Objective::Stress) },
            Case::Case3 => ConstraintSpec { theta_max, ..ConstraintSpec::unconstrained(Objective::Stress) },
            Case::Case4 => ConstraintSpec { theta_max, sigma_allow, ..ConstraintSpec::unconstrained(Objective::CeramicFraction) },
        };
        if let Some([wv, wt, ws]) = self.weights {
            spec.weight_v = wv.or(spec.weight_v);
            spec.weight_theta = wt.or(spec.weight_theta);
            spec.weight_sigma = ws.or(spec.weight_sigma);
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Problem defaults, then `ga` overrides, then the seed (`seed_override` wins).
    pub fn ga_config(&self, seed_override: Option<u64>) -> Result<GaConfig> {
        let base = GaConfig::for_problem(&self.problem).ok_or_else(|| PipelineError::UnknownProblem(self.problem.clone()))?;
        let mut value = serde_json::to_value(base)?;
        let obj = value.as_object_mut().expect("struct serializes to an object");
        for (k, v) in &self.ga {
            if !obj.contains_key(k) {
                return Err(PipelineError::InvalidConfig(format!("unknown GA field '{k}'")));
            }
            obj.insert(k.clone(), v.clone());
        }
        let mut cfg: GaConfig = serde_json::from_value(value)?;
        if let Some(s) = seed_override.or(self.seed) {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Everything an experiment reports, written as `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub build: String,
    pub experiment: ExperimentConfig,
    pub record: RunRecord,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub bundle: ResultBundle,
    pub files: Vec<PathBuf>,
}

/// Runs the GA for an experiment and writes `result.json`, `convergence.csv`
/// and field grids of the FEM-verified optimum into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, seed_override: Option<u64>, out_dir: &Path) -> Result<ExperimentOutcome> {
    let problem = cfg.problem_config()?;
    let spec = cfg.constraint_spec()?;
    let ga = cfg.ga_config(seed_override)?;
    let scheme = scheme_for(&problem);

    let stress;
    let operator;
    let surrogates = if cfg.fem_only {
        None
    } else {
        let path = cfg.models.stress.as_ref().ok_or_else(|| PipelineError::MissingModel("models.stress".into()))?;
        stress = StressSurrogate::load(path).map_err(|e| PipelineError::MissingModel(format!("{}: {e}", path.display())))?;
        operator = match (&cfg.models.temperature, spec.needs_temperature()) {
            (Some(p), _) => Some(OperatorNet::load(p).map_err(|e| PipelineError::MissingModel(format!("{}: {e}", p.display())))?),
            (None, true) => return Err(PipelineError::MissingModel("models.temperature".into())),
            (None, false) => None,
        };
        Some(Surrogates { stress: &stress, temperature: operator.as_ref() })
    };
    let ev = Evaluator { problem: &problem, scheme: &scheme, spec: &spec, surrogates };
    let record = evolve(&ga, &ev, None)?;

    let mut experiment = cfg.clone();
    experiment.seed = Some(ga.seed);
    let bundle = ResultBundle { build: crate::BUILD_FINGERPRINT.into(), experiment, record };

    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    let path = out_dir.join("result.json");
    fs::write(&path, serde_json::to_string_pretty(&bundle)?)?;
    files.push(path);
    let path = out_dir.join("convergence.csv");
    bundle.record.write_convergence_csv(&mut BufWriter::new(fs::File::create(&path)?))?;
    files.push(path);

    let profile = scheme.genes_to_profile_2d(&bundle.record.optimum.genes)?;
    let fem = run_thermoelastic(&profile, &problem)?;
    for (kind, name) in [
        (FieldKind::CeramicFraction, "ceramic_fraction.csv"),
        (FieldKind::Temperature, "temperature.csv"),
        (FieldKind::EffectiveStress, "effective_stress.csv"),
    ] {
        let path = out_dir.join(name);
        write_field_csv(&mut BufWriter::new(fs::File::create(&path)?), &fem, &profile, kind)?;
        files.push(path);
    }
    Ok(ExperimentOutcome { bundle, files })
}
