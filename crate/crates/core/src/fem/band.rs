//! Symmetric banded storage with a banded Cholesky factorization.
//!
//! Structured meshes numbered row by row have a bandwidth of a few element
//! rows, so a band solver is a direct sparse solver with no fill outside the
//! band. Summation order in assembly and factorization is fixed, which makes
//! every solve bit-reproducible.

use super::FemError;

/// Square matrix storing only entries with `|i - j| <= half_band`.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    hb: usize,
    /// Row `i` holds columns `i - hb ..= i + hb` (out-of-range slots are zero).
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, half_band: usize) -> Self {
        let hb = half_band.min(n.saturating_sub(1));
        Self { n, hb, data: vec![0.0; n * (2 * hb + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_band(&self) -> usize {
        self.hb
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.hb, "({i}, {j}) outside band {}", self.hb);
        i * (2 * self.hb + 1) + (j + self.hb - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.hb {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    /// Largest `|A_ij - A_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.n {
            for j in i.saturating_sub(self.hb)..=i {
                let (a, b) = (self.get(i, j), self.get(j, i));
                worst = worst.max((a - b).abs());
                scale = scale.max(a.abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.hb);
                let hi = (i + self.hb).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.slot(i, j)] * x[j]).sum()
            })
            .collect()
    }

    /// Row/column elimination of prescribed values with load correction.
    ///
    /// The diagonal of a constrained row keeps its assembled value `d` and the
    /// load becomes `d * value`, so the system stays symmetric and well scaled.
    pub fn apply_dirichlet(&mut self, rhs: &mut [f64], fixed: &[(usize, f64)]) {
        let mut is_fixed = vec![false; self.n];
        for &(dof, _) in fixed {
            is_fixed[dof] = true;
        }
        for &(c, v) in fixed {
            if v != 0.0 {
                let lo = c.saturating_sub(self.hb);
                let hi = (c + self.hb).min(self.n - 1);
                for i in lo..=hi {
                    if !is_fixed[i] {
                        rhs[i] -= self.get(i, c) * v;
                    }
                }
            }
        }
        for &(c, v) in fixed {
            let lo = c.saturating_sub(self.hb);
            let hi = (c + self.hb).min(self.n - 1);
            let mut d = self.get(c, c);
            if d == 0.0 {
                d = 1.0;
            }
            for i in lo..=hi {
                self.set(i, c, 0.0);
                self.set(c, i, 0.0);
            }
            self.set(c, c, d);
            rhs[c] = d * v;
        }
    }

    /// In-place `L L^T` factorization of the lower band.
    pub fn cholesky(mut self) -> Result<BandCholesky, FemError> {
        let (n, hb, w) = (self.n, self.hb, 2 * self.hb + 1);
        for j in 0..n {
            let lo_j = j.saturating_sub(hb);
            let row_j = j * w + hb - j;
            let diag = self.data[row_j + j];
            let s: f64 = dot(&self.data[row_j + lo_j..row_j + j], &self.data[row_j + lo_j..row_j + j]);
            let pivot = diag - s;
            if !(pivot > 1e-12 * diag.abs()) || !pivot.is_finite() {
                return Err(FemError::SingularSystem(format!(
                    "non-positive pivot {pivot:.3e} at equation {j} (assembled diagonal {diag:.3e})"
                )));
            }
            let l_jj = pivot.sqrt();
            self.data[row_j + j] = l_jj;
            let inv = 1.0 / l_jj;
            for i in j + 1..=(j + hb).min(n - 1) {
                let lo = i.saturating_sub(hb).max(lo_j);
                let row_i = i * w + hb - i;
                let s = dot(&self.data[row_i + lo..row_i + j], &self.data[row_j + lo..row_j + j]);
                self.data[row_i + j] = (self.data[row_i + j] - s) * inv;
            }
        }
        Ok(BandCholesky { n, hb, data: self.data })
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators, fixed order
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for k in 0..4 {
            acc[k] += a[4 * c + k] * b[4 * c + k];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

/// Lower-band Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    hb: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, hb, w) = (self.n, self.hb, 2 * self.hb + 1);
        let l = |i: usize, j: usize| self.data[i * w + hb + j - i];
        let mut y = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(hb);
            let row = i * w + hb - i;
            let s = dot(&self.data[row + lo..row + i], &y[lo..i]);
            y[i] = (y[i] - s) / l(i, i);
        }
        for i in (0..n).rev() {
            y[i] /= l(i, i);
            let yi = y[i];
            let lo = i.saturating_sub(hb);
            let row = i * w + hb - i;
            for j in lo..i {
                y[j] -= self.data[row + j] * yi;
            }
        }
        y
    }
}

/// `||A x - b|| / ||b||`, or the absolute residual norm when `b = 0`.
pub fn relative_residual(a: &BandMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nb > 0.0 {
        r / nb
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, hb: usize) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, hb);
        for i in 0..n {
            for j in i.saturating_sub(hb)..i {
                let v = 1.0 / (1.0 + (i + 2 * j) as f64);
                a.set(i, j, v);
                a.set(j, i, v);
            }
            a.set(i, i, 4.0 + i as f64 * 0.01);
        }
        a
    }

    #[test]
    fn solves_against_dense_reference() {
        let (n, hb) = (40, 5);
        let a = spd(n, hb);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = a.clone().cholesky().unwrap().solve(&b);
        for (p, q) in x.iter().zip(&x_true) {
            assert!((p - q).abs() < 1e-12);
        }
        assert!(relative_residual(&a, &x, &b) < 1e-14);
        assert_eq!(a.asymmetry(), 0.0);
    }

    #[test]
    fn dirichlet_elimination_keeps_symmetry() {
        let (n, hb) = (12, 3);
        let mut a = spd(n, hb);
        let mut b = vec![1.0; n];
        a.apply_dirichlet(&mut b, &[(0, 2.0), (5, -1.0)]);
        assert_eq!(a.asymmetry(), 0.0);
        let x = a.clone().cholesky().unwrap().solve(&b);
        assert!((x[0] - 2.0).abs() < 1e-14 && (x[5] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = BandMatrix::zeros(3, 1);
        for (i, j, v) in [(0, 0, 1.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 1.0)] {
            a.set(i, j, v);
        }
        assert!(matches!(a.cholesky(), Err(FemError::SingularSystem(_))));
    }
}
