//! Structured 9-node quadrilateral meshes and biquadratic shape functions.

use serde::{Deserialize, Serialize};

/// Plate edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Bottom, Edge::Right, Edge::Top, Edge::Left];
}

/// Plate corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopRight,
    TopLeft,
}

/// Three-point Gauss-Legendre rule on `[-1, 1]`.
pub const GAUSS3_POINTS: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
pub const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// 1D quadratic Lagrange basis on nodes `-1, 0, 1` and its derivative.
#[inline]
pub fn lagrange2(t: f64) -> ([f64; 3], [f64; 3]) {
    (
        [0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)],
        [t - 0.5, -2.0 * t, t + 0.5],
    )
}

/// Biquadratic shape functions and their parametric derivatives.
///
/// Local node `b * 3 + a` sits at `(xi_a, eta_b)` with `xi, eta in {-1, 0, 1}`.
#[derive(Debug, Clone, Copy)]
pub struct Q9Shape {
    pub n: [f64; 9],
    pub dxi: [f64; 9],
    pub deta: [f64; 9],
}

impl Q9Shape {
    pub fn at(xi: f64, eta: f64) -> Self {
        let (lx, dlx) = lagrange2(xi);
        let (ly, dly) = lagrange2(eta);
        let mut s = Q9Shape { n: [0.0; 9], dxi: [0.0; 9], deta: [0.0; 9] };
        for b in 0..3 {
            for a in 0..3 {
                let k = b * 3 + a;
                s.n[k] = lx[a] * ly[b];
                s.dxi[k] = dlx[a] * ly[b];
                s.deta[k] = lx[a] * dly[b];
            }
        }
        s
    }
}

/// Shape data for the 3x3 Gauss rule, with weights.
pub fn q9_gauss_table() -> [(Q9Shape, f64); 9] {
    let mut out = [(Q9Shape::at(0.0, 0.0), 0.0); 9];
    for b in 0..3 {
        for a in 0..3 {
            out[b * 3 + a] = (Q9Shape::at(GAUSS3_POINTS[a], GAUSS3_POINTS[b]), GAUSS3_WEIGHTS[a] * GAUSS3_WEIGHTS[b]);
        }
    }
    out
}

/// Physical derivatives and Jacobian determinant at one point of an element.
#[derive(Debug, Clone, Copy)]
pub struct MappedShape {
    pub n: [f64; 9],
    pub dx: [f64; 9],
    pub dy: [f64; 9],
    pub det_j: f64,
    pub x: f64,
    pub y: f64,
}

pub fn map_shape(shape: &Q9Shape, coords: &[[f64; 2]; 9]) -> MappedShape {
    let (mut j11, mut j12, mut j21, mut j22, mut x, mut y) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for k in 0..9 {
        let [cx, cy] = coords[k];
        j11 += shape.dxi[k] * cx;
        j12 += shape.dxi[k] * cy;
        j21 += shape.deta[k] * cx;
        j22 += shape.deta[k] * cy;
        x += shape.n[k] * cx;
        y += shape.n[k] * cy;
    }
    let det_j = j11 * j22 - j12 * j21;
    let inv = 1.0 / det_j;
    let mut dx = [0.0; 9];
    let mut dy = [0.0; 9];
    for k in 0..9 {
        dx[k] = inv * (j22 * shape.dxi[k] - j12 * shape.deta[k]);
        dy[k] = inv * (-j21 * shape.dxi[k] + j11 * shape.deta[k]);
    }
    MappedShape { n: shape.n, dx, dy, det_j, x, y }
}

/// Uniform `nx x ny` mesh of 9-node quads over `[0, L] x [0, H]`.
///
/// Nodes form a `(2nx + 1) x (2ny + 1)` grid numbered row by row along x.
#[derive(Debug, Clone)]
pub struct Mesh {
    nx: usize,
    ny: usize,
    length: f64,
    height: f64,
    coords: Vec<[f64; 2]>,
    elements: Vec<[usize; 9]>,
}

impl Mesh {
    pub fn new(nx: usize, ny: usize, length: f64, height: f64) -> Self {
        assert!(nx > 0 && ny > 0 && length > 0.0 && height > 0.0, "degenerate mesh");
        let (cols, rows) = (2 * nx + 1, 2 * ny + 1);
        let mut coords = Vec::with_capacity(cols * rows);
        for r in 0..rows {
            for c in 0..cols {
                coords.push([length * c as f64 / (2 * nx) as f64, height * r as f64 / (2 * ny) as f64]);
            }
        }
        let mut elements = Vec::with_capacity(nx * ny);
        for ej in 0..ny {
            for ei in 0..nx {
                let mut conn = [0; 9];
                for b in 0..3 {
                    for a in 0..3 {
                        conn[b * 3 + a] = (2 * ej + b) * cols + 2 * ei + a;
                    }
                }
                elements.push(conn);
            }
        }
        Self { nx, ny, length, height, coords, elements }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn elements(&self) -> &[[usize; 9]] {
        &self.elements
    }

    pub fn node_columns(&self) -> usize {
        2 * self.nx + 1
    }

    pub fn node_rows(&self) -> usize {
        2 * self.ny + 1
    }

    pub fn node_id(&self, col: usize, row: usize) -> usize {
        row * self.node_columns() + col
    }

    pub fn element_coords(&self, e: usize) -> [[f64; 2]; 9] {
        let conn = &self.elements[e];
        let mut c = [[0.0; 2]; 9];
        for k in 0..9 {
            c[k] = self.coords[conn[k]];
        }
        c
    }

    /// Largest node-id distance within an element.
    pub fn node_bandwidth(&self) -> usize {
        self.elements
            .iter()
            .map(|c| c.iter().max().unwrap() - c.iter().min().unwrap())
            .max()
            .unwrap_or(0)
    }

    /// Nodes on an edge in increasing coordinate order.
    pub fn edge_nodes(&self, edge: Edge) -> Vec<usize> {
        let (cols, rows) = (self.node_columns(), self.node_rows());
        match edge {
            Edge::Bottom => (0..cols).map(|c| self.node_id(c, 0)).collect(),
            Edge::Top => (0..cols).map(|c| self.node_id(c, rows - 1)).collect(),
            Edge::Left => (0..rows).map(|r| self.node_id(0, r)).collect(),
            Edge::Right => (0..rows).map(|r| self.node_id(cols - 1, r)).collect(),
        }
    }

    /// 3-node boundary segments along an edge.
    pub fn edge_segments(&self, edge: Edge) -> Vec<[usize; 3]> {
        let nodes = self.edge_nodes(edge);
        nodes.windows(3).step_by(2).map(|w| [w[0], w[1], w[2]]).collect()
    }

    pub fn corner_node(&self, corner: Corner) -> usize {
        let (cl, rl) = (self.node_columns() - 1, self.node_rows() - 1);
        match corner {
            Corner::BottomLeft => self.node_id(0, 0),
            Corner::BottomRight => self.node_id(cl, 0),
            Corner::TopRight => self.node_id(cl, rl),
            Corner::TopLeft => self.node_id(0, rl),
        }
    }

    /// Element index and parametric coordinates of a point (clamped into the plate).
    pub fn locate(&self, x: f64, y: f64) -> (usize, f64, f64) {
        let sx = (x / self.length).clamp(0.0, 1.0) * self.nx as f64;
        let sy = (y / self.height).clamp(0.0, 1.0) * self.ny as f64;
        let ei = (sx.floor() as usize).min(self.nx - 1);
        let ej = (sy.floor() as usize).min(self.ny - 1);
        (ej * self.nx + ei, 2.0 * (sx - ei as f64) - 1.0, 2.0 * (sy - ej as f64) - 1.0)
    }

    /// Biquadratic interpolation of a nodal scalar field at `(x, y)`.
    pub fn interpolate(&self, field: &[f64], x: f64, y: f64) -> f64 {
        let (e, xi, eta) = self.locate(x, y);
        let s = Q9Shape::at(xi, eta);
        self.elements[e].iter().zip(&s.n).map(|(&node, n)| n * field[node]).sum()
    }

    /// Minimum Jacobian determinant over all elements' Gauss points.
    pub fn min_jacobian(&self) -> f64 {
        let table = q9_gauss_table();
        (0..self.elements.len())
            .flat_map(|e| {
                let c = self.element_coords(e);
                table.iter().map(move |(s, _)| map_shape(s, &c).det_j).collect::<Vec<_>>()
            })
            .fold(f64::INFINITY, f64::min)
    }
}
