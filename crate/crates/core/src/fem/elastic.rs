use crate::profile::Profile2D;

use super::band::{relative_residual, BandMatrix};
use super::config::{AnalysisMode, BcTarget, Component, ProblemConfig, StressMeasure};
use super::material::{blend, PointMaterial};
use super::mesh::{map_shape, q9_gauss_table, Mesh, Q9Shape};
use super::stress::{effective_stress, SymTensor3};
use super::thermal::edge_quadrature;
use super::{FemError, RESIDUAL_TOLERANCE};

#[derive(Debug, Clone)]
pub struct ElasticSolution {
    /// Interleaved `[u1, u2]` per node.
    pub displacement: Vec<f64>,
    pub residual: f64,
}

/// Stress state at one Gauss point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussStress {
    pub x: f64,
    pub y: f64,
    /// Temperature change from the stress-free state.
    pub theta: f64,
    /// Tensor the effective stress was taken from.
    pub sigma: SymTensor3,
    pub effective: f64,
}

/// In-plane constitutive data for a blended point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PlaneLaw {
    /// In-plane Lame constant (reduced for plane stress).
    lambda: f64,
    mu: f64,
    /// Thermal stress modulus.
    beta: f64,
    /// Out-of-plane isothermal stress per unit volumetric strain and per unit `theta`.
    zz_strain: f64,
    zz_theta: f64,
}

impl PlaneLaw {
    pub(crate) fn new(m: &PointMaterial, mode: AnalysisMode) -> Self {
        let (lambda, mu) = m.lame();
        match mode {
            AnalysisMode::PlaneStrain => Self {
                lambda,
                mu,
                beta: m.e * m.alpha / (1.0 - 2.0 * m.nu),
                zz_strain: lambda,
                zz_theta: 0.0,
            },
            AnalysisMode::PlaneStress => {
                let beta = m.e * m.alpha / (1.0 - m.nu);
                // sigma_zz = 0 makes the isothermal zz component equal beta * theta
                Self { lambda: 2.0 * lambda * mu / (lambda + 2.0 * mu), mu, beta, zz_strain: 0.0, zz_theta: beta }
            }
        }
    }

    fn stress(&self, exx: f64, eyy: f64, gxy: f64, theta: f64, measure: StressMeasure) -> SymTensor3 {
        let tr = exx + eyy;
        let sm = SymTensor3::plane(
            self.lambda * tr + 2.0 * self.mu * exx,
            self.lambda * tr + 2.0 * self.mu * eyy,
            self.zz_strain * tr + self.zz_theta * theta,
            self.mu * gxy,
        );
        match measure {
            StressMeasure::Isothermal => sm,
            StressMeasure::Total => sm.shifted(-self.beta * theta),
            StressMeasure::InPlane => {
                let mut t = sm.shifted(-self.beta * theta);
                t.0[2] = 0.0;
                t
            }
        }
    }
}

fn theta_at(n: &[f64; 9], conn: &[usize; 9], temperature: &[f64], reference: f64) -> f64 {
    (0..9).map(|a| n[a] * (temperature[conn[a]] - reference)).sum()
}

fn constrained_dofs(mesh: &Mesh, config: &ProblemConfig) -> Vec<(usize, f64)> {
    let mut fixed: Vec<(usize, f64)> = Vec::new();
    for bc in &config.mechanical.constraints {
        let nodes = match bc.target {
            BcTarget::Edge(e) => mesh.edge_nodes(e),
            BcTarget::Corner(c) => vec![mesh.corner_node(c)],
        };
        let comp = match bc.component {
            Component::U1 => 0,
            Component::U2 => 1,
        };
        for node in nodes {
            let [x, y] = mesh.coords()[node];
            let dof = 2 * node + comp;
            fixed.retain(|&(d, _)| d != dof);
            fixed.push((dof, bc.eval(x, y)));
        }
    }
    fixed
}

/// Linear elasticity driven by the nodal temperature field.
pub fn solve_elastic(
    mesh: &Mesh,
    profile: &Profile2D,
    config: &ProblemConfig,
    temperature: &[f64],
) -> Result<ElasticSolution, FemError> {
    let n_dof = 2 * mesh.n_nodes();
    let mut k = BandMatrix::zeros(n_dof, 2 * mesh.node_bandwidth() + 1);
    let mut f = vec![0.0; n_dof];
    let table = q9_gauss_table();
    let [bx, by] = config.mechanical.body_force;

    for (e, conn) in mesh.elements().iter().enumerate() {
        let coords = mesh.element_coords(e);
        let mut ke = [[0.0; 18]; 18];
        let mut fe = [0.0; 18];
        for (shape, w) in &table {
            let s = map_shape(shape, &coords);
            let phi_c = profile.interpolate_unchecked(s.x, s.y);
            let law = PlaneLaw::new(&blend(&config.materials, 1.0 - phi_c), config.mode);
            let theta = theta_at(&s.n, conn, temperature, config.reference_temperature);
            let dv = w * s.det_j;
            let (d11, d12, d33) = (law.lambda + 2.0 * law.mu, law.lambda, law.mu);
            let bt = law.beta * theta * dv;
            for a in 0..9 {
                let (xa, ya) = (s.dx[a] * dv, s.dy[a] * dv);
                for b in 0..9 {
                    let (xb, yb) = (s.dx[b], s.dy[b]);
                    ke[2 * a][2 * b] += xa * d11 * xb + ya * d33 * yb;
                    ke[2 * a][2 * b + 1] += xa * d12 * yb + ya * d33 * xb;
                    ke[2 * a + 1][2 * b] += ya * d12 * xb + xa * d33 * yb;
                    ke[2 * a + 1][2 * b + 1] += ya * d11 * yb + xa * d33 * xb;
                }
                fe[2 * a] += bt * s.dx[a] + bx * s.n[a] * dv;
                fe[2 * a + 1] += bt * s.dy[a] + by * s.n[a] * dv;
            }
        }
        for a in 0..18 {
            let ga = 2 * conn[a / 2] + a % 2;
            for b in 0..18 {
                k.add(ga, 2 * conn[b / 2] + b % 2, ke[a][b]);
            }
            f[ga] += fe[a];
        }
    }

    for tr in &config.mechanical.tractions {
        for seg in mesh.edge_segments(tr.edge) {
            for (nv, dl, _) in edge_quadrature(mesh.coords(), &seg) {
                for a in 0..3 {
                    f[2 * seg[a]] += tr.traction[0] * nv[a] * dl;
                    f[2 * seg[a] + 1] += tr.traction[1] * nv[a] * dl;
                }
            }
        }
    }

    let fixed = constrained_dofs(mesh, config);
    if fixed.is_empty() {
        return Err(FemError::SingularSystem("no displacement constraints".into()));
    }
    k.apply_dirichlet(&mut f, &fixed);
    let system = k.clone();
    let u = k.cholesky()?.solve(&f);
    let residual = relative_residual(&system, &u, &f);
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(FemError::Residual(residual));
    }
    Ok(ElasticSolution { displacement: u, residual })
}

/// Stress at every Gauss point, element by element in `(eta, xi)` order.
pub fn gauss_point_stresses(
    mesh: &Mesh,
    profile: &Profile2D,
    config: &ProblemConfig,
    temperature: &[f64],
    displacement: &[f64],
) -> Vec<GaussStress> {
    let table = q9_gauss_table();
    let shapes: Vec<Q9Shape> = table.iter().map(|(s, _)| *s).collect();
    stresses_at(mesh, profile, config, temperature, displacement, &shapes)
}

/// Stress at the given parametric points of every element.
pub fn element_point_stresses(
    mesh: &Mesh,
    profile: &Profile2D,
    config: &ProblemConfig,
    temperature: &[f64],
    displacement: &[f64],
    points: &[[f64; 2]],
) -> Vec<GaussStress> {
    let shapes: Vec<Q9Shape> = points.iter().map(|&[xi, eta]| Q9Shape::at(xi, eta)).collect();
    stresses_at(mesh, profile, config, temperature, displacement, &shapes)
}

fn stresses_at(
    mesh: &Mesh,
    profile: &Profile2D,
    config: &ProblemConfig,
    temperature: &[f64],
    displacement: &[f64],
    shapes: &[Q9Shape],
) -> Vec<GaussStress> {
    let mut out = Vec::with_capacity(shapes.len() * mesh.elements().len());
    for (e, conn) in mesh.elements().iter().enumerate() {
        let coords = mesh.element_coords(e);
        for shape in shapes {
            let s = map_shape(shape, &coords);
            let phi_c = profile.interpolate_unchecked(s.x, s.y);
            let law = PlaneLaw::new(&blend(&config.materials, 1.0 - phi_c), config.mode);
            let theta = theta_at(&s.n, conn, temperature, config.reference_temperature);
            let (mut exx, mut eyy, mut gxy) = (0.0, 0.0, 0.0);
            for a in 0..9 {
                let (u1, u2) = (displacement[2 * conn[a]], displacement[2 * conn[a] + 1]);
                exx += s.dx[a] * u1;
                eyy += s.dy[a] * u2;
                gxy += s.dy[a] * u1 + s.dx[a] * u2;
            }
            let sigma = law.stress(exx, eyy, gxy, theta, config.stress_measure);
            out.push(GaussStress { x: s.x, y: s.y, theta, sigma, effective: effective_stress(&sigma) });
        }
    }
    out
}
