//! Axisymmetric grids, level set initialization, reinitialization and
//! parametrized surface families.

mod family;
mod grid;
mod reinit;
mod scalar;
mod surface;

pub use family::{circle_profile, family_surface, FamilyBase, FamilyMix, FamilySpec};
pub use grid::{build_grid, AxiGrid};
pub use reinit::{reinitialize, REINIT_BAND_CELLS};
pub use scalar::ScalarField;
pub use surface::{init_signed_distance, SurfaceSpec, GRID_MARGIN_CELLS};

pub(crate) use reinit::reinitialize_banded;

use std::io::Write;

use crate::real::Real;

/// Writes `r,z,u` triples, one node per line, with a header.
pub fn write_field_csv<T: Real, W: Write>(field: &ScalarField<T>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "r,z,u")?;
    for (k, u) in field.values.iter().enumerate() {
        let (r, z) = field.grid.node(k);
        writeln!(out, "{r},{z},{u}")?;
    }
    Ok(())
}

/// Flat little-endian dump: `nr, nz` as u64, then `r_max, z_min, z_max, h`
/// and every node value as f64, row-major in `z`.
pub fn write_field_binary<T: Real, W: Write>(field: &ScalarField<T>, mut out: W) -> std::io::Result<()> {
    let g = &field.grid;
    out.write_all(&(g.nr as u64).to_le_bytes())?;
    out.write_all(&(g.nz as u64).to_le_bytes())?;
    for v in [g.r_max, g.z_min, g.z_max, g.h].iter().chain(field.values.iter()) {
        out.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}
