use crate::profile::Profile2D;

use super::band::{relative_residual, BandMatrix};
use super::config::{ProblemConfig, ThermalBc, ThermalLoad};
use super::material::blend;
use super::mesh::{lagrange2, map_shape, q9_gauss_table, Edge, Mesh, GAUSS3_POINTS, GAUSS3_WEIGHTS};
use super::{FemError, RESIDUAL_TOLERANCE};

/// Nodal temperature and the boundary heat budget of a conduction solve.
#[derive(Debug, Clone)]
pub struct ThermalSolution {
    pub temperature: Vec<f64>,
    pub residual: f64,
    /// Heat entering through prescribed-temperature nodes (reactions), W/m.
    pub dirichlet_inflow: f64,
    /// Heat entering through flux edges, W/m.
    pub flux_inflow: f64,
    /// Heat leaving through convection edges, W/m.
    pub convective_outflow: f64,
    /// Integrated volumetric source, W/m.
    pub source_total: f64,
}

impl ThermalSolution {
    /// `(in - out) / max(in, out)`; zero for an exactly balanced solution.
    pub fn heat_imbalance(&self) -> f64 {
        let inflow = self.dirichlet_inflow + self.flux_inflow + self.source_total;
        let scale = inflow.abs().max(self.convective_outflow.abs()).max(f64::MIN_POSITIVE);
        (inflow - self.convective_outflow) / scale
    }
}

/// Sample points and weights along a 3-node edge segment.
pub(crate) fn edge_quadrature<'a>(
    coords: &'a [[f64; 2]],
    seg: &[usize; 3],
) -> impl Iterator<Item = ([f64; 3], f64, [f64; 2])> + 'a {
    let seg = *seg;
    (0..3).map(move |g| {
        let (n, dn) = lagrange2(GAUSS3_POINTS[g]);
        let (mut tx, mut ty, mut x, mut y) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..3 {
            let [cx, cy] = coords[seg[k]];
            tx += dn[k] * cx;
            ty += dn[k] * cy;
            x += n[k] * cx;
            y += n[k] * cy;
        }
        (n, GAUSS3_WEIGHTS[g] * (tx * tx + ty * ty).sqrt(), [x, y])
    })
}

pub(crate) fn edge_coordinate(edge: Edge, x: f64, y: f64) -> f64 {
    match edge {
        Edge::Bottom | Edge::Top => x,
        Edge::Left | Edge::Right => y,
    }
}

/// Steady conduction `K theta = f` with graded conductivity.
pub fn solve_thermal(mesh: &Mesh, profile: &Profile2D, config: &ProblemConfig) -> Result<ThermalSolution, FemError> {
    let ThermalLoad::Conduction { bcs, source } = &config.thermal else {
        return Err(FemError::InvalidConfig("problem has no conduction analysis".into()));
    };
    let n = mesh.n_nodes();
    let mut k = BandMatrix::zeros(n, mesh.node_bandwidth());
    let mut f = vec![0.0; n];
    let table = q9_gauss_table();

    for (e, conn) in mesh.elements().iter().enumerate() {
        let coords = mesh.element_coords(e);
        let mut ke = [[0.0; 9]; 9];
        let mut fe = [0.0; 9];
        for (shape, w) in &table {
            let s = map_shape(shape, &coords);
            let phi_c = profile.interpolate_unchecked(s.x, s.y);
            let cond = blend(&config.materials, 1.0 - phi_c).k;
            if !(cond > 0.0) {
                return Err(FemError::NonPositiveConductivity(cond));
            }
            let dv = w * s.det_j;
            for a in 0..9 {
                for b in 0..9 {
                    ke[a][b] += cond * (s.dx[a] * s.dx[b] + s.dy[a] * s.dy[b]) * dv;
                }
                fe[a] += source * s.n[a] * dv;
            }
        }
        for a in 0..9 {
            for b in 0..9 {
                k.add(conn[a], conn[b], ke[a][b]);
            }
            f[conn[a]] += fe[a];
        }
    }

    let mut fixed: Vec<(usize, f64)> = Vec::new();
    let mut flux_inflow = 0.0;
    for edge in Edge::ALL {
        match bcs.get(edge) {
            ThermalBc::Adiabatic => {}
            ThermalBc::Flux { q } => {
                for seg in mesh.edge_segments(edge) {
                    for (nv, dl, _) in edge_quadrature(mesh.coords(), &seg) {
                        for a in 0..3 {
                            f[seg[a]] += q * nv[a] * dl;
                        }
                        flux_inflow += q * dl;
                    }
                }
            }
            ThermalBc::Convection { h, ambient } => {
                for seg in mesh.edge_segments(edge) {
                    for (nv, dl, _) in edge_quadrature(mesh.coords(), &seg) {
                        for a in 0..3 {
                            for b in 0..3 {
                                k.add(seg[a], seg[b], h * nv[a] * nv[b] * dl);
                            }
                            f[seg[a]] += h * ambient * nv[a] * dl;
                        }
                    }
                }
            }
            ThermalBc::Dirichlet { value } => {
                for node in mesh.edge_nodes(edge) {
                    let [x, y] = mesh.coords()[node];
                    fixed.retain(|&(d, _)| d != node);
                    fixed.push((node, value.eval(edge_coordinate(edge, x, y))));
                }
            }
        }
    }
    if fixed.is_empty()
        && !Edge::ALL.iter().any(|&e| matches!(bcs.get(e), ThermalBc::Convection { h, .. } if *h > 0.0))
    {
        return Err(FemError::SingularSystem("no temperature-fixing boundary condition".into()));
    }

    let k_full = k.clone();
    let f_full = f.clone();
    let mut k_red = k;
    k_red.apply_dirichlet(&mut f, &fixed);
    let system = k_red.clone();
    let theta = k_red.cholesky()?.solve(&f);
    let residual = relative_residual(&system, &theta, &f);
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(FemError::Residual(residual));
    }

    let kt = k_full.mul_vec(&theta);
    let dirichlet_inflow: f64 = fixed.iter().map(|&(d, _)| kt[d] - f_full[d]).sum();
    let mut convective_outflow = 0.0;
    for edge in Edge::ALL {
        if let ThermalBc::Convection { h, ambient } = bcs.get(edge) {
            for seg in mesh.edge_segments(edge) {
                for (nv, dl, _) in edge_quadrature(mesh.coords(), &seg) {
                    let t: f64 = (0..3).map(|a| nv[a] * theta[seg[a]]).sum();
                    convective_outflow += h * (t - ambient) * dl;
                }
            }
        }
    }
    Ok(ThermalSolution {
        temperature: theta,
        residual,
        dirichlet_inflow,
        flux_inflow,
        convective_outflow,
        source_total: source * mesh.length() * mesh.height(),
    })
}
