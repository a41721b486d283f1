//! Volume-fraction gradation profiles.
//!
//! A 1D profile is the vector of nodal volume fractions on `n + 1` equispaced
//! nodes. It starts at 0, its first interior value is drawn from a set of
//! buckets, and every later value is the previous one times a bounded ratio,
//! clipped at 1. Profiles that never reach 1 are rescaled so the last node is 1.
//!
//! 2D profiles are tensor products of an x profile and a y profile and are
//! evaluated between nodes by bilinear interpolation. Throughout the crate the
//! profile value is the *ceramic* volume fraction.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::Rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("invalid profile configuration: {0}")]
    InvalidConfig(String),
    #[error("gene {index} = {value} outside [{lo}, {hi}]")]
    GeneOutOfBounds { index: usize, value: f64, lo: f64, hi: f64 },
    #[error("gene vector has length {got}, expected {expected}")]
    GeneLength { got: usize, expected: usize },
    #[error("point ({x}, {y}) outside the plate [0, {length}] x [0, {height}]")]
    OutOfDomain { x: f64, y: f64, length: f64, height: f64 },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

type Result<T> = std::result::Result<T, ProfileError>;

/// Closed intervals from which the first interior node value is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct BucketSpec {
    buckets: Vec<[f64; 2]>,
}

impl BucketSpec {
    pub fn new(buckets: Vec<[f64; 2]>) -> Result<Self> {
        if buckets.is_empty() {
            return Err(ProfileError::InvalidConfig("at least one bucket is required".into()));
        }
        for &[lo, hi] in &buckets {
            if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
                return Err(ProfileError::InvalidConfig(format!(
                    "bucket [{lo}, {hi}] must satisfy 0 < lo <= hi <= 1"
                )));
            }
        }
        Ok(Self { buckets })
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![[lo, hi]])
    }

    pub fn buckets(&self) -> &[[f64; 2]] {
        &self.buckets
    }

    /// Convex hull of all buckets.
    pub fn hull(&self) -> [f64; 2] {
        let lo = self.buckets.iter().map(|b| b[0]).fold(f64::INFINITY, f64::min);
        let hi = self.buckets.iter().map(|b| b[1]).fold(f64::NEG_INFINITY, f64::max);
        [lo, hi]
    }

    pub fn contains(&self, v: f64) -> bool {
        self.buckets.iter().any(|&[lo, hi]| v >= lo && v <= hi)
    }

    /// Uniform bucket choice, then uniform within the bucket.
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let [lo, hi] = self.buckets[rng.gen_range(0..self.buckets.len())];
        if hi > lo {
            rng.gen_range(lo..=hi)
        } else {
            lo
        }
    }
}

impl TryFrom<Vec<[f64; 2]>> for BucketSpec {
    type Error = ProfileError;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BucketSpec> for Vec<[f64; 2]> {
    fn from(b: BucketSpec) -> Self {
        b.buckets
    }
}

/// Settings of the bounded-ratio generator for one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    /// Number of 1D segments; the profile has `n_elems + 1` nodes.
    pub n_elems: usize,
    /// Lower ratio bound. 1 gives monotone profiles.
    pub alpha_lower: f64,
    /// Cap `b` on the per-profile upper ratio bound, drawn from `[1, b]`.
    pub alpha_upper_max: f64,
    pub first_node_buckets: BucketSpec,
    pub normalize_to_one: bool,
}

impl GenerationConfig {
    pub fn new(
        n_elems: usize,
        alpha_lower: f64,
        alpha_upper_max: f64,
        first_node_buckets: BucketSpec,
        normalize_to_one: bool,
    ) -> Result<Self> {
        let cfg = Self { n_elems, alpha_lower, alpha_upper_max, first_node_buckets, normalize_to_one };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elems < 1 {
            return Err(ProfileError::InvalidConfig("n_elems must be at least 1".into()));
        }
        if !(self.alpha_lower > 0.0) {
            return Err(ProfileError::InvalidConfig("alpha_lower must be positive".into()));
        }
        if !(self.alpha_upper_max > 1.0) {
            return Err(ProfileError::InvalidConfig("alpha_upper_max must exceed 1".into()));
        }
        if self.alpha_lower > self.alpha_upper_max {
            return Err(ProfileError::InvalidConfig("alpha_lower exceeds alpha_upper_max".into()));
        }
        Ok(())
    }

    /// Number of ratio genes (`n_elems - 1`).
    pub fn n_alphas(&self) -> usize {
        self.n_elems - 1
    }

    /// Monotone generator with `b = 3` and the two low first-node buckets.
    pub fn two_bucket(n_elems: usize) -> Self {
        Self {
            n_elems,
            alpha_lower: 1.0,
            alpha_upper_max: 3.0,
            first_node_buckets: BucketSpec { buckets: vec![[0.001, 0.01], [0.01, 0.1]] },
            normalize_to_one: true,
        }
    }

    /// Monotone generator with `b = 3` and the single wide bucket `[0.001, 1]`.
    pub fn wide_bucket(n_elems: usize) -> Self {
        Self {
            n_elems,
            alpha_lower: 1.0,
            alpha_upper_max: 3.0,
            first_node_buckets: BucketSpec { buckets: vec![[0.001, 1.0]] },
            normalize_to_one: true,
        }
    }
}

/// Nodal volume fractions on `n + 1` equispaced nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Profile1DRepr", into = "Profile1DRepr")]
pub struct Profile1D {
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Profile1DRepr {
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<Profile1DRepr> for Profile1D {
    type Error = ProfileError;
    fn try_from(r: Profile1DRepr) -> Result<Self> {
        if r.values.len() != r.n + 1 {
            return Err(ProfileError::InvalidProfile(format!(
                "n = {} but {} values",
                r.n,
                r.values.len()
            )));
        }
        Profile1D::new(r.values)
    }
}

impl From<Profile1D> for Profile1DRepr {
    fn from(p: Profile1D) -> Self {
        Self { n: p.n_elems(), values: p.values }
    }
}

impl Profile1D {
    /// Checks `values[0] = 0` and `0 <= v <= 1`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(ProfileError::InvalidProfile("a profile needs at least two nodes".into()));
        }
        if values[0] != 0.0 {
            return Err(ProfileError::InvalidProfile("first node must be 0".into()));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(ProfileError::InvalidProfile(format!("value {v} outside [0, 1]")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_elems(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// All interior nodes equal to one, node 0 at zero.
    pub fn ones(n_elems: usize) -> Self {
        let mut values = vec![1.0; n_elems + 1];
        values[0] = 0.0;
        Self { values }
    }
}

/// Replays `phi_{i+1} = min(1, alpha_i phi_i)` from `phi_1`, then optionally
/// rescales nodes `1..=n` by the last node when it is below one.
pub fn replay_ratios(phi1: f64, alphas: &[f64], normalize: bool) -> Vec<f64> {
    let mut values = Vec::with_capacity(alphas.len() + 2);
    values.push(0.0);
    values.push(phi1.min(1.0));
    for &a in alphas {
        let prev = *values.last().unwrap();
        values.push((a * prev).min(1.0));
    }
    let last = *values.last().unwrap();
    if normalize && last < 1.0 && last > 0.0 {
        for v in values.iter_mut().skip(1) {
            *v /= last;
        }
        // exact 1 at the end regardless of rounding
        *values.last_mut().unwrap() = 1.0;
    }
    values
}

/// Draws `(phi_1, alphas)` for one axis.
pub fn generate_axis_genes(rng: &mut Rng, config: &GenerationConfig) -> (f64, Vec<f64>) {
    let lo_u = config.alpha_lower.max(1.0);
    let alpha_upper = if config.alpha_upper_max > lo_u {
        rng.gen_range(lo_u..=config.alpha_upper_max)
    } else {
        config.alpha_upper_max
    };
    let phi1 = config.first_node_buckets.sample(rng);
    let (a_lo, a_hi) = (config.alpha_lower.min(alpha_upper), alpha_upper);
    let alphas = (0..config.n_alphas())
        .map(|_| if a_hi > a_lo { rng.gen_range(a_lo..=a_hi) } else { a_lo })
        .collect();
    (phi1, alphas)
}

/// One random profile from the bounded-ratio scheme.
pub fn generate_profile_1d(rng: &mut Rng, config: &GenerationConfig) -> Profile1D {
    let (phi1, alphas) = generate_axis_genes(rng, config);
    Profile1D { values: replay_ratios(phi1, &alphas, config.normalize_to_one) }
}

/// Power-law profile `(i/n)^m`, with node 0 pinned to 0 (also for `m = 0`).
pub fn power_law_profile(n_elems: usize, m: f64) -> Profile1D {
    let n = n_elems as f64;
    let mut values: Vec<f64> = (0..=n_elems).map(|i| (i as f64 / n).powf(m)).collect();
    values[0] = 0.0;
    Profile1D { values }
}

/// First-order ratios `1 + m / (n beta_i) = 1 + m / i` for `i = 1..n-1`.
pub fn power_law_alphas(n_elems: usize, m: f64) -> Vec<f64> {
    (1..n_elems).map(|i| 1.0 + m / i as f64).collect()
}

/// Exact successive ratios `(1 + 1/i)^m` of the power law.
pub fn power_law_exact_ratios(n_elems: usize, m: f64) -> Vec<f64> {
    (1..n_elems).map(|i| (1.0 + 1.0 / i as f64).powf(m)).collect()
}

/// First interior node of the power law, `(1/n)^m`.
pub fn power_law_first_node(n_elems: usize, m: f64) -> f64 {
    (1.0 / n_elems as f64).powf(m)
}

/// GA genome: first-node fractions and ratio vectors for both axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradationGenes {
    pub phi_x1: f64,
    pub phi_y1: f64,
    pub alphas_x: Vec<f64>,
    pub alphas_y: Vec<f64>,
}

impl GradationGenes {
    /// Flat layout `[phi_x1, phi_y1, alphas_x.., alphas_y..]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 + self.alphas_x.len() + self.alphas_y.len());
        v.push(self.phi_x1);
        v.push(self.phi_y1);
        v.extend_from_slice(&self.alphas_x);
        v.extend_from_slice(&self.alphas_y);
        v
    }

    pub fn from_vec(v: &[f64], n_alphas_x: usize, n_alphas_y: usize) -> Result<Self> {
        let expected = 2 + n_alphas_x + n_alphas_y;
        if v.len() != expected {
            return Err(ProfileError::GeneLength { got: v.len(), expected });
        }
        Ok(Self {
            phi_x1: v[0],
            phi_y1: v[1],
            alphas_x: v[2..2 + n_alphas_x].to_vec(),
            alphas_y: v[2 + n_alphas_x..].to_vec(),
        })
    }
}

/// Per-gene closed intervals in the flat gene layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl GeneBounds {
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn contains(&self, genes: &[f64]) -> bool {
        genes.len() == self.len()
            && genes.iter().zip(self.lower.iter().zip(&self.upper)).all(|(g, (lo, hi))| g >= lo && g <= hi)
    }

    pub fn check(&self, genes: &[f64]) -> Result<()> {
        if genes.len() != self.len() {
            return Err(ProfileError::GeneLength { got: genes.len(), expected: self.len() });
        }
        for (index, (&value, (&lo, &hi))) in genes.iter().zip(self.lower.iter().zip(&self.upper)).enumerate() {
            if !(value >= lo && value <= hi) {
                return Err(ProfileError::GeneOutOfBounds { index, value, lo, hi });
            }
        }
        Ok(())
    }
}

/// Two-axis generation scheme over an `L x H` plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileScheme {
    pub x: GenerationConfig,
    pub y: GenerationConfig,
    pub length: f64,
    pub height: f64,
}

impl ProfileScheme {
    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        if !(self.length > 0.0 && self.height > 0.0) {
            return Err(ProfileError::InvalidConfig("plate dimensions must be positive".into()));
        }
        Ok(())
    }

    /// Wide bucket along x, two low buckets along y, `b = 3`, monotone.
    pub fn standard(n_elems_x: usize, n_elems_y: usize, length: f64, height: f64) -> Self {
        Self {
            x: GenerationConfig::wide_bucket(n_elems_x),
            y: GenerationConfig::two_bucket(n_elems_y),
            length,
            height,
        }
    }

    pub fn n_genes(&self) -> usize {
        2 + self.x.n_alphas() + self.y.n_alphas()
    }

    /// Branch/surrogate input width: both node vectors concatenated.
    pub fn input_dim(&self) -> usize {
        self.x.n_elems + self.y.n_elems + 2
    }

    /// `phi_1` bounded by the bucket hull, ratios by `[alpha_lower, b]`.
    pub fn gene_bounds(&self) -> GeneBounds {
        let [xl, xh] = self.x.first_node_buckets.hull();
        let [yl, yh] = self.y.first_node_buckets.hull();
        let mut lower = vec![xl, yl];
        let mut upper = vec![xh, yh];
        lower.extend(std::iter::repeat(self.x.alpha_lower).take(self.x.n_alphas()));
        upper.extend(std::iter::repeat(self.x.alpha_upper_max).take(self.x.n_alphas()));
        lower.extend(std::iter::repeat(self.y.alpha_lower).take(self.y.n_alphas()));
        upper.extend(std::iter::repeat(self.y.alpha_upper_max).take(self.y.n_alphas()));
        GeneBounds { lower, upper }
    }

    pub fn generate_genes(&self, rng: &mut Rng) -> GradationGenes {
        let (phi_x1, alphas_x) = generate_axis_genes(rng, &self.x);
        let (phi_y1, alphas_y) = generate_axis_genes(rng, &self.y);
        GradationGenes { phi_x1, phi_y1, alphas_x, alphas_y }
    }

    /// Deterministic replay of both axes from stored genes.
    pub fn genes_to_profiles(&self, genes: &GradationGenes) -> Result<(Profile1D, Profile1D)> {
        if genes.alphas_x.len() != self.x.n_alphas() || genes.alphas_y.len() != self.y.n_alphas() {
            return Err(ProfileError::GeneLength {
                got: 2 + genes.alphas_x.len() + genes.alphas_y.len(),
                expected: self.n_genes(),
            });
        }
        self.gene_bounds().check(&genes.to_vec())?;
        let px = replay_ratios(genes.phi_x1, &genes.alphas_x, self.x.normalize_to_one);
        let py = replay_ratios(genes.phi_y1, &genes.alphas_y, self.y.normalize_to_one);
        Ok((Profile1D { values: px }, Profile1D { values: py }))
    }

    pub fn genes_to_profile_2d(&self, genes: &GradationGenes) -> Result<Profile2D> {
        let (px, py) = self.genes_to_profiles(genes)?;
        Ok(tensor_product(&px, &py, self.length, self.height))
    }
}

/// Concatenated `(phi_x nodes, phi_y nodes)` network input.
pub fn surrogate_input(px: &Profile1D, py: &Profile1D) -> Vec<f64> {
    px.values().iter().chain(py.values()).copied().collect()
}

/// Nodal ceramic fraction on an `(nx + 1) x (ny + 1)` grid over `[0, L] x [0, H]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Profile2DRepr", into = "Profile2DRepr")]
pub struct Profile2D {
    nx: usize,
    ny: usize,
    length: f64,
    height: f64,
    /// `grid[i * (ny + 1) + j]` is the value at `(x_i, y_j)`.
    grid: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Profile2DRepr {
    nx: usize,
    ny: usize,
    #[serde(rename = "L")]
    length: f64,
    #[serde(rename = "H")]
    height: f64,
    grid: Vec<f64>,
}

impl TryFrom<Profile2DRepr> for Profile2D {
    type Error = ProfileError;
    fn try_from(r: Profile2DRepr) -> Result<Self> {
        Profile2D::from_grid(r.nx, r.ny, r.length, r.height, r.grid)
    }
}

impl From<Profile2D> for Profile2DRepr {
    fn from(p: Profile2D) -> Self {
        Self { nx: p.nx, ny: p.ny, length: p.length, height: p.height, grid: p.grid }
    }
}

/// `grid[i][j] = px[i] * py[j]`.
pub fn tensor_product(px: &Profile1D, py: &Profile1D, length: f64, height: f64) -> Profile2D {
    let (nx, ny) = (px.n_elems(), py.n_elems());
    let mut grid = Vec::with_capacity((nx + 1) * (ny + 1));
    for &a in px.values() {
        for &b in py.values() {
            grid.push(a * b);
        }
    }
    Profile2D { nx, ny, length, height, grid }
}

/// Bilinear shape functions at `(xi, eta)` in corner order
/// `(-1,-1), (1,-1), (1,1), (-1,1)`.
pub fn bilinear_shape(xi: f64, eta: f64) -> [f64; 4] {
    [
        0.25 * (1.0 - xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 + eta),
        0.25 * (1.0 - xi) * (1.0 + eta),
    ]
}

impl Profile2D {
    pub fn from_grid(nx: usize, ny: usize, length: f64, height: f64, grid: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(ProfileError::InvalidProfile("grid needs at least one cell per axis".into()));
        }
        if grid.len() != (nx + 1) * (ny + 1) {
            return Err(ProfileError::InvalidProfile(format!(
                "grid has {} entries, expected {}",
                grid.len(),
                (nx + 1) * (ny + 1)
            )));
        }
        if !(length > 0.0 && height > 0.0) {
            return Err(ProfileError::InvalidProfile("plate dimensions must be positive".into()));
        }
        if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(ProfileError::InvalidProfile(format!("value {v} outside [0, 1]")));
        }
        Ok(Self { nx, ny, length, height, grid })
    }

    /// Samples `f(x/L, y/H)` at the grid nodes, clamped to `[0, 1]`.
    pub fn from_fn(nx: usize, ny: usize, length: f64, height: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut grid = Vec::with_capacity((nx + 1) * (ny + 1));
        for i in 0..=nx {
            for j in 0..=ny {
                grid.push(f(i as f64 / nx as f64, j as f64 / ny as f64).clamp(0.0, 1.0));
            }
        }
        Self { nx, ny, length, height, grid }
    }

    pub fn uniform(nx: usize, ny: usize, length: f64, height: f64, value: f64) -> Self {
        Self::from_fn(nx, ny, length, height, |_, _| value)
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

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.grid[i * (self.ny + 1) + j]
    }

    pub fn node_coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.length * i as f64 / self.nx as f64, self.height * j as f64 / self.ny as f64)
    }

    pub fn is_monotone(&self) -> bool {
        for i in 0..=self.nx {
            for j in 0..=self.ny {
                if i > 0 && self.at(i, j) < self.at(i - 1, j) {
                    return false;
                }
                if j > 0 && self.at(i, j) < self.at(i, j - 1) {
                    return false;
                }
            }
        }
        true
    }

    /// Bilinear interpolation inside the containing cell.
    pub fn interpolate(&self, x: f64, y: f64) -> Result<f64> {
        let tol = 1e-12;
        if !(x >= -tol * self.length
            && x <= self.length * (1.0 + tol)
            && y >= -tol * self.height
            && y <= self.height * (1.0 + tol))
        {
            return Err(ProfileError::OutOfDomain { x, y, length: self.length, height: self.height });
        }
        Ok(self.interpolate_unchecked(x, y))
    }

    /// Same as [`Self::interpolate`], clamping the point into the plate.
    pub fn interpolate_unchecked(&self, x: f64, y: f64) -> f64 {
        let (i, xi) = locate(x / self.length, self.nx);
        let (j, eta) = locate(y / self.height, self.ny);
        let n = bilinear_shape(xi, eta);
        n[0] * self.at(i, j) + n[1] * self.at(i + 1, j) + n[2] * self.at(i + 1, j + 1) + n[3] * self.at(i, j + 1)
    }

    /// Domain average of the bilinear field, 3x3 Gauss per cell.
    pub fn average(&self) -> f64 {
        let (g, w) = gauss3();
        let mut total = 0.0;
        for i in 0..self.nx {
            for j in 0..self.ny {
                let c = [self.at(i, j), self.at(i + 1, j), self.at(i + 1, j + 1), self.at(i, j + 1)];
                for a in 0..3 {
                    for b in 0..3 {
                        let n = bilinear_shape(g[a], g[b]);
                        let v: f64 = n.iter().zip(&c).map(|(n, c)| n * c).sum();
                        total += w[a] * w[b] * v;
                    }
                }
            }
        }
        // each cell maps [-1,1]^2 (area 4) onto 1/(nx ny) of the plate
        total / (4.0 * (self.nx * self.ny) as f64)
    }
}

/// Domain-average ceramic fraction `V_ca`.
pub fn average_ceramic_fraction(p: &Profile2D) -> f64 {
    p.average()
}

/// Cell index and local coordinate for a normalized position `t` on `n` cells.
fn locate(t: f64, n: usize) -> (usize, f64) {
    let s = (t.clamp(0.0, 1.0)) * n as f64;
    let i = (s.floor() as usize).min(n - 1);
    let local = s - i as f64;
    (i, 2.0 * local - 1.0)
}

fn gauss3() -> ([f64; 3], [f64; 3]) {
    let a = (0.6f64).sqrt();
    ([-a, 0.0, a], [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn unit_ratios_normalize_to_step() {
        let raw = replay_ratios(0.2, &[1.0, 1.0, 1.0], false);
        assert_close(&raw, &[0.0, 0.2, 0.2, 0.2, 0.2], 0.0);
        let norm = replay_ratios(0.2, &[1.0, 1.0, 1.0], true);
        assert_close(&norm, &[0.0, 1.0, 1.0, 1.0, 1.0], 1e-15);
    }

    #[test]
    fn forced_ratio_is_geometric_until_clipped() {
        let mut rng = seeded(3);
        let bucket = BucketSpec::single(0.01, 0.01).unwrap();
        let cfg = GenerationConfig::new(6, 3.0, 3.0, bucket, false).unwrap();
        let p = generate_profile_1d(&mut rng, &cfg);
        let expected = [0.0, 0.01, 0.03, 0.09, 0.27, 0.81, 1.0];
        assert_close(p.values(), &expected, 1e-15);
    }

    #[test]
    fn ratio_perturbation_is_local() {
        let alphas = vec![1.1, 1.2, 1.05, 1.3, 1.1];
        let base = replay_ratios(0.01, &alphas, false);
        for k in 0..alphas.len() {
            let mut a = alphas.clone();
            a[k] += 0.1;
            let p = replay_ratios(0.01, &a, false);
            // alphas[k] is alpha_{k+1}; it drives node k + 2
            for i in 0..base.len() {
                if i < k + 2 {
                    assert_eq!(p[i], base[i]);
                } else {
                    assert!(p[i] > base[i]);
                }
            }
        }
    }

    #[test]
    fn generated_profiles_satisfy_invariants() {
        let cfg = GenerationConfig::two_bucket(20);
        let mut rng = seeded(11);
        for _ in 0..10_000 {
            let p = generate_profile_1d(&mut rng, &cfg);
            let v = p.values();
            assert_eq!(v[0], 0.0);
            assert_eq!(v[20], 1.0);
            assert!(p.is_monotone());
            assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn genes_replay_matches_generation() {
        let scheme = ProfileScheme::standard(20, 20, 0.15, 0.06);
        let mut rng = seeded(5);
        for _ in 0..100 {
            let genes = scheme.generate_genes(&mut rng);
            let (px, py) = scheme.genes_to_profiles(&genes).unwrap();
            let rx = replay_ratios(genes.phi_x1, &genes.alphas_x, true);
            let ry = replay_ratios(genes.phi_y1, &genes.alphas_y, true);
            assert_eq!(px.values(), &rx[..]);
            assert_eq!(py.values(), &ry[..]);
            let flat = genes.to_vec();
            let back = GradationGenes::from_vec(&flat, 19, 19).unwrap();
            assert_eq!(back, genes);
        }
    }

    #[test]
    fn out_of_bounds_gene_is_rejected() {
        let scheme = ProfileScheme::standard(4, 4, 1.0, 1.0);
        let genes = GradationGenes {
            phi_x1: 0.5,
            phi_y1: 0.05,
            alphas_x: vec![1.0, 3.5, 1.0],
            alphas_y: vec![1.0; 3],
        };
        match scheme.genes_to_profiles(&genes) {
            Err(ProfileError::GeneOutOfBounds { index, .. }) => assert_eq!(index, 3),
            other => panic!("unexpected {other:?}"),
        }
        let genes = GradationGenes { phi_y1: 0.2, alphas_x: vec![1.0; 3], ..genes };
        assert!(matches!(scheme.genes_to_profiles(&genes), Err(ProfileError::GeneOutOfBounds { index: 1, .. })));
    }

    #[test]
    fn tensor_product_is_outer_product() {
        let px = Profile1D::new(vec![0.0, 0.5, 1.0]).unwrap();
        let py = Profile1D::new(vec![0.0, 1.0]).unwrap();
        let p = tensor_product(&px, &py, 1.0, 1.0);
        assert_eq!(p.grid(), &[0.0, 0.0, 0.0, 0.5, 0.0, 1.0]);

        let px = power_law_profile(5, 1.7);
        let p = tensor_product(&px, &Profile1D::ones(3), 1.0, 1.0);
        for j in 1..=3 {
            for i in 0..=5 {
                assert_eq!(p.at(i, j), px.values()[i]);
            }
        }
    }

    #[test]
    fn tensor_product_of_monotone_profiles_is_monotone() {
        let cfg = GenerationConfig::two_bucket(10);
        let mut rng = seeded(21);
        for _ in 0..1000 {
            let px = generate_profile_1d(&mut rng, &cfg);
            let py = generate_profile_1d(&mut rng, &cfg);
            assert!(tensor_product(&px, &py, 2.0, 1.0).is_monotone());
        }
    }

    #[test]
    fn interpolation_hits_nodes_and_cell_centers() {
        let cfg = GenerationConfig::wide_bucket(6);
        let mut rng = seeded(2);
        let p = tensor_product(&generate_profile_1d(&mut rng, &cfg), &generate_profile_1d(&mut rng, &cfg), 0.3, 0.2);
        for i in 0..=6 {
            for j in 0..=6 {
                let (x, y) = p.node_coords(i, j);
                assert!((p.interpolate(x, y).unwrap() - p.at(i, j)).abs() < 1e-15);
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                let (x0, y0) = p.node_coords(i, j);
                let (x1, y1) = p.node_coords(i + 1, j + 1);
                let mean = 0.25 * (p.at(i, j) + p.at(i + 1, j) + p.at(i + 1, j + 1) + p.at(i, j + 1));
                let v = p.interpolate(0.5 * (x0 + x1), 0.5 * (y0 + y1)).unwrap();
                assert!((v - mean).abs() < 1e-14);
            }
        }
        assert!(matches!(p.interpolate(0.31, 0.1), Err(ProfileError::OutOfDomain { .. })));
        assert!(matches!(p.interpolate(0.1, -0.01), Err(ProfileError::OutOfDomain { .. })));
    }

    #[test]
    fn bilinear_partition_of_unity() {
        let mut rng = seeded(9);
        for _ in 0..10_000 {
            let (xi, eta) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            let s: f64 = bilinear_shape(xi, eta).iter().sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn power_law_values() {
        assert_close(power_law_profile(2, 1.0).values(), &[0.0, 0.5, 1.0], 0.0);
        assert_close(power_law_profile(4, 2.0).values(), &[0.0, 0.0625, 0.25, 0.5625, 1.0], 1e-16);
        assert_close(power_law_profile(3, 0.0).values(), &[0.0, 1.0, 1.0, 1.0], 0.0);
    }

    #[test]
    fn linear_power_law_ratios_are_exact() {
        for n in [3, 10, 57] {
            let first = power_law_alphas(n, 1.0);
            let exact = power_law_exact_ratios(n, 1.0);
            for (i, (a, b)) in first.iter().zip(&exact).enumerate() {
                let k = (i + 1) as f64;
                assert!((a - (k + 1.0) / k).abs() < 1e-15);
                assert!((b - (k + 1.0) / k).abs() < 1e-15);
            }
            let replay = replay_ratios(power_law_first_node(n, 1.0), &first, false);
            assert_close(&replay, power_law_profile(n, 1.0).values(), 1e-14);
        }
    }

    #[test]
    fn average_of_uniform_and_bilinear() {
        assert!((Profile2D::uniform(7, 3, 0.2, 0.1, 0.5).average() - 0.5).abs() < 1e-15);
        let lin = power_law_profile(9, 1.0);
        let p = tensor_product(&lin, &power_law_profile(4, 1.0), 0.15, 0.06);
        assert!((average_ceramic_fraction(&p) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn profile_json_shapes() {
        let p = Profile1D::new(vec![0.0, 0.25, 1.0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":2,"values":[0.0,0.25,1.0]}"#);
        assert_eq!(serde_json::from_str::<Profile1D>(&s).unwrap(), p);
        assert!(serde_json::from_str::<Profile1D>(r#"{"n":3,"values":[0.0,1.0]}"#).is_err());

        let p2 = tensor_product(&p, &Profile1D::ones(1), 0.1, 0.2);
        let s = serde_json::to_string(&p2).unwrap();
        assert!(s.contains(r#""L":0.1"#) && s.contains(r#""H":0.2"#));
        assert_eq!(serde_json::from_str::<Profile2D>(&s).unwrap(), p2);

        let g = GradationGenes { phi_x1: 0.5, phi_y1: 0.01, alphas_x: vec![1.5], alphas_y: vec![2.0] };
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"phi_x1":0.5,"phi_y1":0.01,"alphas_x":[1.5],"alphas_y":[2.0]}"#);
    }

    #[test]
    fn config_validation() {
        let b = BucketSpec::single(0.01, 0.1).unwrap();
        assert!(GenerationConfig::new(0, 1.0, 3.0, b.clone(), true).is_err());
        assert!(GenerationConfig::new(4, 0.0, 3.0, b.clone(), true).is_err());
        assert!(GenerationConfig::new(4, 1.0, 1.0, b.clone(), true).is_err());
        assert!(GenerationConfig::new(4, 4.0, 3.0, b, true).is_err());
        assert!(BucketSpec::new(vec![]).is_err());
        assert!(BucketSpec::new(vec![[0.0, 0.1]]).is_err());
        assert!(BucketSpec::new(vec![[0.2, 0.1]]).is_err());
        assert!(BucketSpec::new(vec![[0.2, 1.1]]).is_err());
    }
}
