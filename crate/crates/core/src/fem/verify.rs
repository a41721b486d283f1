//! Closed-form checks of the solver, shared by tests and the `verify` command.

use serde::{Deserialize, Serialize};

use crate::profile::Profile2D;

use super::config::{
    AnalysisMode, BcTarget, Component, DisplacementBc, EdgeFunction, MechBcSet, ProblemConfig, StressMeasure,
    ThermalBc, ThermalBcSet, ThermalLoad,
};
use super::material::MaterialPair;
use super::mesh::Edge;
use super::{run_thermoelastic, FemError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyCheck {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerifyCheck {
    fn relative(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        let passed = (value - expected).abs() <= tolerance * expected.abs().max(f64::MIN_POSITIVE);
        Self { name: name.into(), value, expected, tolerance, passed }
    }

    fn absolute(name: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, expected, tolerance, passed: (value - expected).abs() <= tolerance }
    }
}

fn homogeneous_plate(mode: AnalysisMode, delta: f64, constraints: Vec<DisplacementBc>) -> ProblemConfig {
    ProblemConfig {
        name: "verify".into(),
        length: 0.1,
        height: 0.05,
        nx: 4,
        ny: 3,
        materials: MaterialPair::aluminum_zirconia(),
        mode,
        thermal: ThermalLoad::UniformChange { delta },
        mechanical: MechBcSet { constraints, ..Default::default() },
        reference_temperature: 20.0,
        stress_measure: StressMeasure::Isothermal,
    }
}

fn all_edges_fixed() -> Vec<DisplacementBc> {
    Edge::ALL
        .iter()
        .flat_map(|&e| {
            [DisplacementBc::fixed(BcTarget::Edge(e), Component::U1), DisplacementBc::fixed(BcTarget::Edge(e), Component::U2)]
        })
        .collect()
}

fn conduction_slab(bcs: ThermalBcSet, source: f64, nx: usize) -> ProblemConfig {
    let mut cfg = homogeneous_plate(AnalysisMode::PlaneStress, 0.0, all_edges_fixed());
    cfg.nx = nx;
    cfg.thermal = ThermalLoad::Conduction { bcs, source };
    cfg
}

fn max_rel_error(values: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for (v, e) in values {
        err = err.max((v - e).abs());
        scale = scale.max(e.abs());
    }
    err / scale
}

/// Runs every check; all use homogeneous aluminum plates except the last two.
pub fn run_checks() -> Result<Vec<VerifyCheck>, FemError> {
    let mut out = Vec::new();
    let delta = 100.0;
    let (length, height) = (0.1, 0.05);
    let metal = Profile2D::uniform(4, 3, length, height, 0.0);
    let m = MaterialPair::aluminum_zirconia().metal;

    // Rollers on two edges leave the plate free to expand.
    let free = homogeneous_plate(
        AnalysisMode::PlaneStress,
        delta,
        vec![
            DisplacementBc::fixed(BcTarget::Edge(Edge::Left), Component::U1),
            DisplacementBc::fixed(BcTarget::Edge(Edge::Bottom), Component::U2),
        ],
    );
    let r = run_thermoelastic(&metal, &free)?;
    let scale = m.e * m.alpha * delta;
    out.push(VerifyCheck::absolute("free_expansion_stress_ratio", r.sigma_e_max / scale, 0.0, 1e-6));
    let u_err = max_rel_error(r.mesh.coords().iter().enumerate().flat_map(|(n, c)| {
        [(r.displacement[2 * n], m.alpha * delta * c[0]), (r.displacement[2 * n + 1], m.alpha * delta * c[1])]
    }));
    out.push(VerifyCheck::absolute("free_expansion_displacement", u_err, 0.0, 1e-9));

    let stress = homogeneous_plate(AnalysisMode::PlaneStress, delta, all_edges_fixed());
    let r = run_thermoelastic(&metal, &stress)?;
    out.push(VerifyCheck::relative("constrained_plane_stress", r.sigma_e_max, scale / (1.0 - m.nu), 1e-6));

    let mut strain = homogeneous_plate(AnalysisMode::PlaneStrain, delta, all_edges_fixed());
    strain.stress_measure = StressMeasure::Total;
    let r = run_thermoelastic(&metal, &strain)?;
    let sxx = r.gauss.iter().map(|g| g.sigma.0[0]).fold(f64::NAN, f64::max);
    out.push(VerifyCheck::relative("constrained_plane_strain_sxx", sxx, -scale / (1.0 - 2.0 * m.nu), 1e-6));

    // Linear displacement on the whole boundary gives a uniform stress state.
    let grad = [[1e-3, 4e-4], [-2e-4, 5e-4]];
    let patch_bcs = Edge::ALL
        .iter()
        .flat_map(|&e| {
            [(Component::U1, grad[0]), (Component::U2, grad[1])].map(|(c, g)| DisplacementBc {
                target: BcTarget::Edge(e),
                component: c,
                value: 0.0,
                gradient: g,
            })
        })
        .collect();
    let patch = homogeneous_plate(AnalysisMode::PlaneStress, 0.0, patch_bcs);
    let r = run_thermoelastic(&metal, &patch)?;
    let (lambda, mu) = {
        let (l, mu) = super::material_at(&patch.materials, 1.0)?.lame();
        (2.0 * l * mu / (l + 2.0 * mu), mu)
    };
    let (exx, eyy, gxy) = (grad[0][0], grad[1][1], grad[0][1] + grad[1][0]);
    let exact = [lambda * (exx + eyy) + 2.0 * mu * exx, lambda * (exx + eyy) + 2.0 * mu * eyy, mu * gxy];
    let err = max_rel_error(r.gauss.iter().flat_map(|g| [(g.sigma.0[0], exact[0]), (g.sigma.0[1], exact[1]), (g.sigma.0[3], exact[2])]));
    out.push(VerifyCheck::absolute("elastic_patch_test", err, 0.0, 1e-8));

    // Linear temperature data on every edge.
    let lin = |offset: f64, slope: f64| ThermalBc::Dirichlet { value: EdgeFunction::Linear { offset, slope } };
    let (t0, gx, gy) = (10.0, 100.0, 50.0);
    let bcs = ThermalBcSet {
        bottom: lin(t0, gx),
        top: lin(t0 + gy * height, gx),
        left: lin(t0, gy),
        right: lin(t0 + gx * length, gy),
    };
    let r = run_thermoelastic(&metal, &conduction_slab(bcs, 0.0, 4))?;
    let err = max_rel_error(r.mesh.coords().iter().zip(&r.temperature).map(|(c, &t)| (t, t0 + gx * c[0] + gy * c[1])));
    out.push(VerifyCheck::absolute("thermal_patch_test", err, 0.0, 1e-9));

    // Uniform source between two cold edges: theta = Q x (L - x) / 2k.
    let q = 1e5;
    let mut bcs = ThermalBcSet::all_adiabatic();
    bcs.left = ThermalBc::Dirichlet { value: EdgeFunction::Constant { value: 0.0 } };
    bcs.right = bcs.left.clone();
    let r = run_thermoelastic(&metal, &conduction_slab(bcs.clone(), q, 4))?;
    let err = max_rel_error(r.mesh.coords().iter().zip(&r.temperature).map(|(c, &t)| (t, q * c[0] * (length - c[0]) / (2.0 * m.k))));
    out.push(VerifyCheck::absolute("parabolic_conduction", err, 0.0, 1e-6));

    // Metal left half, ceramic right half with a one-cell ramp; the midline
    // temperature follows from the series resistance of the slab.
    let (t_left, t_right) = (100.0, 0.0);
    bcs.left = ThermalBc::Dirichlet { value: EdgeFunction::Constant { value: t_left } };
    bcs.right = ThermalBc::Dirichlet { value: EdgeFunction::Constant { value: t_right } };
    let cells = 10;
    let step = Profile2D::from_fn(cells, 2, length, height, |s, _| if s <= 0.5 + 1e-12 { 0.0 } else { 1.0 });
    let r = run_thermoelastic(&step, &conduction_slab(bcs, 0.0, 4 * cells))?;
    let pair = MaterialPair::aluminum_zirconia();
    let (km, kc) = (pair.metal.k, pair.ceramic.k);
    let dx = length / cells as f64;
    let r_metal = 0.5 * length / km;
    let r_ramp = dx * (km / kc).ln() / (km - kc);
    let r_ceramic = (0.5 * length - dx) / kc;
    let mid = t_left - (t_left - t_right) * r_metal / (r_metal + r_ramp + r_ceramic);
    out.push(VerifyCheck::relative("series_resistance_midline", r.mesh.interpolate(&r.temperature, 0.5 * length, 0.5 * height), mid, 1e-4));

    let p2 = ProblemConfig::problem2();
    let graded = Profile2D::from_fn(20, 20, p2.length, p2.height, |_, y| y);
    let r = run_thermoelastic(&graded, &p2)?;
    let imbalance = r.thermal.as_ref().map_or(f64::NAN, |t| t.heat_imbalance());
    out.push(VerifyCheck::absolute("problem2_heat_balance", imbalance, 0.0, 1e-8));
    Ok(out)
}
