use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::profile::Profile2D;

use super::analysis::FemResult;

/// Field written by [`write_field_csv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Nodal temperature.
    Temperature,
    /// Nodal displacement, columns `u1,u2`.
    Displacement,
    /// Gauss-point effective stress.
    EffectiveStress,
    /// Ceramic fraction at the profile grid nodes.
    CeramicFraction,
}

impl FieldKind {
    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).ok()
    }
}

/// `x,y,value` rows (or `x,y,u1,u2` for displacement).
pub fn write_field_csv<W: Write>(out: &mut W, result: &FemResult, profile: &Profile2D, kind: FieldKind) -> io::Result<()> {
    match kind {
        FieldKind::Temperature => {
            writeln!(out, "x,y,temperature")?;
            for (c, t) in result.mesh.coords().iter().zip(&result.temperature) {
                writeln!(out, "{},{},{}", c[0], c[1], t)?;
            }
        }
        FieldKind::Displacement => {
            writeln!(out, "x,y,u1,u2")?;
            for (n, c) in result.mesh.coords().iter().enumerate() {
                writeln!(out, "{},{},{},{}", c[0], c[1], result.displacement[2 * n], result.displacement[2 * n + 1])?;
            }
        }
        FieldKind::EffectiveStress => {
            writeln!(out, "x,y,effective_stress")?;
            for g in &result.gauss {
                writeln!(out, "{},{},{}", g.x, g.y, g.effective)?;
            }
        }
        FieldKind::CeramicFraction => {
            writeln!(out, "x,y,ceramic_fraction")?;
            for i in 0..=profile.nx() {
                for j in 0..=profile.ny() {
                    let (x, y) = profile.node_coords(i, j);
                    writeln!(out, "{},{},{}", x, y, profile.at(i, j))?;
                }
            }
        }
    }
    Ok(())
}
