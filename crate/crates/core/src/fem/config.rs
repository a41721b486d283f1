//! Problem definitions: geometry, mesh, phases, boundary conditions, mode.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::material::MaterialPair;
use super::mesh::{Corner, Edge};
use super::FemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisMode {
    PlaneStrain,
    PlaneStress,
}

/// Tensor the effective stress is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressMeasure {
    /// Isothermal stress `sigma_m = lambda tr(eps) I + 2 mu eps`.
    #[default]
    Isothermal,
    /// Total stress `sigma = sigma_m - beta theta I`.
    Total,
    /// In-plane part of the total stress with `sigma_zz` dropped.
    InPlane,
}

/// Prescribed temperature along an edge as a function of the edge coordinate
/// `s` (x on bottom/top, y on left/right).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeFunction {
    Constant { value: f64 },
    Linear { offset: f64, slope: f64 },
    /// `amplitude * sin(wavenumber * s)`
    Sine { amplitude: f64, wavenumber: f64 },
}

impl EdgeFunction {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            EdgeFunction::Constant { value } => value,
            EdgeFunction::Linear { offset, slope } => offset + slope * s,
            EdgeFunction::Sine { amplitude, wavenumber } => amplitude * (wavenumber * s).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThermalBc {
    Dirichlet { value: EdgeFunction },
    /// Inward normal heat flux `q_hat`, W/m^2.
    Flux { q: f64 },
    /// `h (theta - ambient)` leaves through the edge.
    Convection { h: f64, ambient: f64 },
    Adiabatic,
}

/// One condition per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalBcSet {
    pub bottom: ThermalBc,
    pub right: ThermalBc,
    pub top: ThermalBc,
    pub left: ThermalBc,
}

impl ThermalBcSet {
    pub fn get(&self, edge: Edge) -> &ThermalBc {
        match edge {
            Edge::Bottom => &self.bottom,
            Edge::Right => &self.right,
            Edge::Top => &self.top,
            Edge::Left => &self.left,
        }
    }

    pub fn all_adiabatic() -> Self {
        Self { bottom: ThermalBc::Adiabatic, right: ThermalBc::Adiabatic, top: ThermalBc::Adiabatic, left: ThermalBc::Adiabatic }
    }
}

/// Temperature loading of the plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThermalLoad {
    /// Uniform change from the reference temperature; no conduction solve.
    UniformChange { delta: f64 },
    /// Steady conduction with per-edge conditions and a volumetric source, W/m^3.
    Conduction {
        bcs: ThermalBcSet,
        #[serde(default)]
        source: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcTarget {
    Edge(Edge),
    Corner(Corner),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    U1,
    U2,
}

/// Prescribed displacement `value + gradient . (x, y)` on a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementBc {
    pub target: BcTarget,
    pub component: Component,
    #[serde(default)]
    pub value: f64,
    #[serde(default)]
    pub gradient: [f64; 2],
}

impl DisplacementBc {
    pub fn fixed(target: BcTarget, component: Component) -> Self {
        Self { target, component, value: 0.0, gradient: [0.0; 2] }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.value + self.gradient[0] * x + self.gradient[1] * y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTraction {
    pub edge: Edge,
    /// Traction vector, Pa.
    pub traction: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MechBcSet {
    pub constraints: Vec<DisplacementBc>,
    #[serde(default)]
    pub tractions: Vec<EdgeTraction>,
    /// Body force, N/m^3.
    #[serde(default)]
    pub body_force: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub name: String,
    /// Plate length along x, m.
    pub length: f64,
    /// Plate height along y, m.
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    pub materials: MaterialPair,
    pub mode: AnalysisMode,
    pub thermal: ThermalLoad,
    pub mechanical: MechBcSet,
    /// Stress-free temperature; thermal strain is driven by `T - reference`.
    #[serde(default)]
    pub reference_temperature: f64,
    #[serde(default)]
    pub stress_measure: StressMeasure,
}

impl ProblemConfig {
    /// Ni/Al2O3 half plate, 0.1 m x 0.1 m, plane strain, cooled uniformly
    /// from 1000 K to 300 K. Left edge is the symmetry line (`u1 = 0`); the
    /// bottom edge carries `u2 = 0` to remove the vertical rigid mode.
    pub fn problem1() -> Self {
        Self {
            name: "problem1".into(),
            length: 0.1,
            height: 0.1,
            nx: 40,
            ny: 40,
            materials: MaterialPair::nickel_alumina(),
            mode: AnalysisMode::PlaneStrain,
            thermal: ThermalLoad::UniformChange { delta: -700.0 },
            mechanical: MechBcSet {
                constraints: vec![
                    DisplacementBc::fixed(BcTarget::Edge(Edge::Left), Component::U1),
                    DisplacementBc::fixed(BcTarget::Edge(Edge::Bottom), Component::U2),
                ],
                ..Default::default()
            },
            reference_temperature: 1000.0,
            stress_measure: StressMeasure::Isothermal,
        }
    }

    /// Al/ZrO2 half plate, 0.15 m x 0.06 m, plane stress. Top edge held at
    /// `500 sin(pi x / 2L)` degC, left and bottom convect to 0 degC with
    /// `h = 50`, right edge is the adiabatic symmetry line with `u1 = 0`, and
    /// the lower-left corner has `u2 = 0`.
    pub fn problem2() -> Self {
        let length = 0.15;
        let conv = ThermalBc::Convection { h: 50.0, ambient: 0.0 };
        Self {
            name: "problem2".into(),
            length,
            height: 0.06,
            nx: 20,
            ny: 20,
            materials: MaterialPair::aluminum_zirconia(),
            mode: AnalysisMode::PlaneStress,
            thermal: ThermalLoad::Conduction {
                bcs: ThermalBcSet {
                    bottom: conv.clone(),
                    right: ThermalBc::Adiabatic,
                    top: ThermalBc::Dirichlet {
                        value: EdgeFunction::Sine { amplitude: 500.0, wavenumber: PI / (2.0 * length) },
                    },
                    left: conv,
                },
                source: 0.0,
            },
            mechanical: MechBcSet {
                constraints: vec![
                    DisplacementBc::fixed(BcTarget::Edge(Edge::Right), Component::U1),
                    DisplacementBc::fixed(BcTarget::Corner(Corner::BottomLeft), Component::U2),
                ],
                ..Default::default()
            },
            reference_temperature: 0.0,
            stress_measure: StressMeasure::Isothermal,
        }
    }

    pub fn builtin(id: &str) -> Option<Self> {
        match id {
            "problem1" => Some(Self::problem1()),
            "problem2" => Some(Self::problem2()),
            _ => None,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self, FemError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FemError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| FemError::InvalidConfig(format!("cannot parse {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), FemError> {
        if !(self.length > 0.0 && self.height > 0.0) {
            return Err(FemError::InvalidConfig("plate dimensions must be positive".into()));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(FemError::InvalidConfig("mesh needs at least one element per axis".into()));
        }
        self.materials.validate()?;
        if let ThermalLoad::Conduction { bcs, .. } = &self.thermal {
            let fixes = Edge::ALL.iter().any(|&e| match bcs.get(e) {
                ThermalBc::Dirichlet { .. } => true,
                ThermalBc::Convection { h, .. } => *h > 0.0,
                _ => false,
            });
            if !fixes {
                return Err(FemError::SingularSystem(
                    "thermal problem needs a Dirichlet or convection edge".into(),
                ));
            }
        }
        if self.mechanical.constraints.is_empty() {
            return Err(FemError::SingularSystem("no displacement constraints".into()));
        }
        Ok(())
    }

    /// Absolute temperature for a uniform-change problem.
    pub fn uniform_temperature(&self) -> Option<f64> {
        match self.thermal {
            ThermalLoad::UniformChange { delta } => Some(self.reference_temperature + delta),
            ThermalLoad::Conduction { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_roundtrip_through_json() {
        for cfg in [ProblemConfig::problem1(), ProblemConfig::problem2()] {
            cfg.validate().unwrap();
            let s = serde_json::to_string_pretty(&cfg).unwrap();
            let back: ProblemConfig = serde_json::from_str(&s).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn named_materials_in_config() {
        let mut v = serde_json::to_value(ProblemConfig::problem2()).unwrap();
        v["materials"] = serde_json::json!({"metal": "aluminum", "ceramic": "zirconia"});
        let cfg: ProblemConfig = serde_json::from_value(v).unwrap();
        assert_eq!(cfg.materials, MaterialPair::aluminum_zirconia());
    }

    #[test]
    fn pure_neumann_thermal_problem_is_rejected() {
        let mut cfg = ProblemConfig::problem2();
        cfg.thermal = ThermalLoad::Conduction { bcs: ThermalBcSet::all_adiabatic(), source: 1.0 };
        assert!(matches!(cfg.validate(), Err(FemError::SingularSystem(_))));
    }

    #[test]
    fn sine_top_edge_matches_loading() {
        let cfg = ProblemConfig::problem2();
        let ThermalLoad::Conduction { bcs, .. } = &cfg.thermal else { panic!() };
        let ThermalBc::Dirichlet { value } = &bcs.top else { panic!() };
        assert!((value.eval(0.15) - 500.0).abs() < 1e-12);
        assert!(value.eval(0.0).abs() < 1e-12);
    }
}
