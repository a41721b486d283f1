//! Stress tensors and the von Mises measure.

use serde::{Deserialize, Serialize};

/// Symmetric 3x3 tensor stored as `[xx, yy, zz, xy, yz, zx]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor3(pub [f64; 6]);

impl SymTensor3 {
    pub fn plane(xx: f64, yy: f64, zz: f64, xy: f64) -> Self {
        Self([xx, yy, zz, xy, 0.0, 0.0])
    }

    pub fn trace(&self) -> f64 {
        self.0[0] + self.0[1] + self.0[2]
    }

    /// `self + s I`
    pub fn shifted(&self, s: f64) -> Self {
        let mut t = self.0;
        t[0] += s;
        t[1] += s;
        t[2] += s;
        Self(t)
    }
}

/// `sqrt(3/2 s:s)` with `s` the deviator; invariant under `sigma + p I`.
pub fn effective_stress(t: &SymTensor3) -> f64 {
    let [xx, yy, zz, xy, yz, zx] = t.0;
    let normal = (xx - yy).powi(2) + (yy - zz).powi(2) + (zz - xx).powi(2);
    (0.5 * normal + 3.0 * (xy * xy + yz * yz + zx * zx)).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniaxial_and_shear() {
        assert!((effective_stress(&SymTensor3::plane(100.0, 0.0, 0.0, 0.0)) - 100.0).abs() < 1e-12);
        let shear = effective_stress(&SymTensor3::plane(0.0, 0.0, 0.0, 10.0));
        assert!((shear - 10.0 * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(effective_stress(&SymTensor3::plane(-5.0, -5.0, -5.0, 0.0)), 0.0);
    }
}
