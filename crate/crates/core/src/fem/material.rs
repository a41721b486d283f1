//! Phase properties and the linear rule of mixtures.

use serde::{Deserialize, Serialize};

use super::FemError;

/// Isotropic phase, SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialRepr")]
pub struct Material {
    pub name: String,
    /// Young's modulus, Pa.
    pub e: f64,
    pub nu: f64,
    /// Thermal expansion coefficient, 1/K.
    pub alpha: f64,
    /// Conductivity, W/(m K).
    pub k: f64,
    /// Density, kg/m^3.
    pub rho: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MaterialRepr {
    Named(String),
    Inline { name: Option<String>, e: f64, nu: f64, alpha: f64, k: f64, rho: f64 },
}

impl TryFrom<MaterialRepr> for Material {
    type Error = FemError;
    fn try_from(r: MaterialRepr) -> Result<Self, FemError> {
        let m = match r {
            MaterialRepr::Named(name) => Material::builtin(&name)
                .ok_or_else(|| FemError::InvalidConfig(format!("unknown material '{name}'")))?,
            MaterialRepr::Inline { name, e, nu, alpha, k, rho } => {
                Material { name: name.unwrap_or_else(|| "custom".into()), e, nu, alpha, k, rho }
            }
        };
        m.validate()?;
        Ok(m)
    }
}

impl Material {
    pub fn nickel() -> Self {
        Self { name: "nickel".into(), e: 199.5e9, nu: 0.3, alpha: 15.4e-6, k: 60.7, rho: 8880.0 }
    }

    pub fn alumina() -> Self {
        Self { name: "alumina".into(), e: 393.0e9, nu: 0.3, alpha: 7.4e-6, k: 30.0, rho: 3960.0 }
    }

    pub fn aluminum() -> Self {
        Self { name: "aluminum".into(), e: 70.0e9, nu: 0.3, alpha: 23.4e-6, k: 233.0, rho: 2707.0 }
    }

    pub fn zirconia() -> Self {
        Self { name: "zirconia".into(), e: 200.0e9, nu: 0.3, alpha: 10.0e-6, k: 2.2, rho: 5700.0 }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "nickel" | "ni" => Some(Self::nickel()),
            "alumina" | "al2o3" => Some(Self::alumina()),
            "aluminum" | "aluminium" | "al" => Some(Self::aluminum()),
            "zirconia" | "zro2" => Some(Self::zirconia()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        let ok = self.e > 0.0 && (0.0..0.5).contains(&self.nu) && self.k > 0.0 && self.rho > 0.0 && self.alpha.is_finite();
        if ok {
            Ok(())
        } else {
            Err(FemError::InvalidConfig(format!("material '{}' has non-physical properties", self.name)))
        }
    }
}

/// Metal and ceramic phases of a graded plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialPair {
    pub metal: Material,
    pub ceramic: Material,
}

impl MaterialPair {
    pub fn nickel_alumina() -> Self {
        Self { metal: Material::nickel(), ceramic: Material::alumina() }
    }

    pub fn aluminum_zirconia() -> Self {
        Self { metal: Material::aluminum(), ceramic: Material::zirconia() }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        self.metal.validate()?;
        self.ceramic.validate()
    }
}

/// Blended properties at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMaterial {
    pub e: f64,
    pub nu: f64,
    pub alpha: f64,
    pub k: f64,
    pub rho: f64,
}

impl PointMaterial {
    pub fn lame(&self) -> (f64, f64) {
        let lambda = self.e * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu));
        let mu = self.e / (2.0 * (1.0 + self.nu));
        (lambda, mu)
    }
}

/// `P = P_m phi_m + P_c (1 - phi_m)` for every property.
pub fn material_at(pair: &MaterialPair, phi_metal: f64) -> Result<PointMaterial, FemError> {
    if !(0.0..=1.0).contains(&phi_metal) {
        return Err(FemError::PhiOutOfRange(phi_metal));
    }
    Ok(blend(pair, phi_metal))
}

#[inline]
pub(crate) fn blend(pair: &MaterialPair, phi_metal: f64) -> PointMaterial {
    let (m, c) = (&pair.metal, &pair.ceramic);
    let mix = |pm: f64, pc: f64| pm * phi_metal + pc * (1.0 - phi_metal);
    PointMaterial {
        e: mix(m.e, c.e),
        nu: mix(m.nu, c.nu),
        alpha: mix(m.alpha, c.alpha),
        k: mix(m.k, c.k),
        rho: mix(m.rho, c.rho),
    }
}
