use serde::{Deserialize, Serialize};

use super::grid::AxiGrid;
use super::scalar::ScalarField;
use crate::error::{Error, Result};
use crate::profile::{inside_polygon, point_segment_distance, segments, ProfileCurve};
use crate::real::Real;

/// Clearance (in cells) required between a surface and the outer grid boundary.
pub const GRID_MARGIN_CELLS: usize = 5;

/// A rotationally symmetric closed surface, described by its generating data
/// in the `(r, z)` half-plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec<T: Real> {
    Sphere {
        #[serde(default)]
        center_z: T,
        radius: T,
    },
    /// Solid cylinder `r <= radius`, `|z - center_z| <= length / 2` with flat caps.
    Cylinder {
        radius: T,
        length: T,
        #[serde(default)]
        center_z: T,
    },
    Torus {
        core_radius: T,
        tube_radius: T,
        #[serde(default)]
        center_z: T,
    },
    /// Normal offset of a profile by `offset + amplitude * cos(2 pi k s / L)`,
    /// with `s` the arclength from the first sample and positive values
    /// pointing away from the enclosed region.
    OffsetOfProfile {
        base: ProfileCurve<T>,
        offset: T,
        #[serde(default)]
        mode: u32,
        #[serde(default)]
        amplitude: T,
    },
}

impl<T: Real> SurfaceSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        match self {
            SurfaceSpec::Sphere { radius, .. } if *radius <= z => {
                Err(Error::Config("sphere radius must be positive".into()))
            }
            SurfaceSpec::Cylinder { radius, length, .. } if *radius <= z || *length <= z => {
                Err(Error::Config("cylinder radius and length must be positive".into()))
            }
            SurfaceSpec::Torus { core_radius, tube_radius, .. } => {
                if *tube_radius <= z || *core_radius <= z {
                    Err(Error::Config("torus radii must be positive".into()))
                } else if tube_radius >= core_radius {
                    Err(Error::Config("torus requires tube radius < core radius".into()))
                } else {
                    Ok(())
                }
            }
            SurfaceSpec::OffsetOfProfile { base, .. } => {
                base.validate()?;
                let curve = self.offset_curve(T::infinity())?;
                if !curve.is_simple() {
                    return Err(Error::Config("offset profile self-intersects".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `(r_max, z_min, z_max)` of the generating curve.
    pub fn extent(&self) -> Result<(T, T, T)> {
        Ok(match self {
            SurfaceSpec::Sphere { center_z, radius } => (*radius, *center_z - *radius, *center_z + *radius),
            SurfaceSpec::Cylinder { radius, length, center_z } => {
                let half = *length * T::lit(0.5);
                (*radius, *center_z - half, *center_z + half)
            }
            SurfaceSpec::Torus { core_radius, tube_radius, center_z } => {
                (*core_radius + *tube_radius, *center_z - *tube_radius, *center_z + *tube_radius)
            }
            SurfaceSpec::OffsetOfProfile { .. } => {
                let (_, r1, z0, z1) = self.offset_curve(T::infinity())?.bounding_box();
                (r1, z0, z1)
            }
        })
    }

    /// The offset generating curve; `spacing` bounds the sample spacing of
    /// the base before offsetting (pass infinity to keep the base samples).
    pub fn offset_curve(&self, spacing: T) -> Result<ProfileCurve<T>> {
        let SurfaceSpec::OffsetOfProfile { base, offset, mode, amplitude } = self else {
            return Err(Error::Argument("offset_curve needs an OffsetOfProfile spec".into()));
        };
        let base = if spacing.is_finite() { base.resampled(spacing) } else { base.clone() };
        let normals = base.outward_normals();
        let total = base.length();
        let k = T::from_u32(*mode).unwrap_or_else(T::zero);
        let two_pi = T::lit(2.0) * T::PI();
        let mut pts: Vec<(T, T)> = base
            .points
            .iter()
            .zip(&normals)
            .map(|(p, n)| {
                let d = *offset + *amplitude * (two_pi * k * p.s / total).cos();
                (p.r + d * n.0, p.z + d * n.1)
            })
            .collect();
        if !base.closed {
            // endpoints stay pinned to the axis
            if let Some(first) = pts.first_mut() {
                first.0 = T::zero();
            }
            if let Some(last) = pts.last_mut() {
                last.0 = T::zero();
            }
        }
        let curve = ProfileCurve::from_positions(&pts, base.closed);
        if base.closed && curve.points.iter().any(|p| p.r <= T::zero()) {
            return Err(Error::Config("offset profile crosses the axis".into()));
        }
        if curve.points.iter().any(|p| p.r < T::zero()) {
            return Err(Error::Config("offset profile leaves the half-plane".into()));
        }
        Ok(curve)
    }
}

/// Signed distance to the surface on the grid: exact for the analytic
/// variants, exact distance to the (finely sampled) offset polygon for
/// profile offsets.
pub fn init_signed_distance<T: Real>(spec: &SurfaceSpec<T>, grid: &AxiGrid<T>) -> Result<ScalarField<T>> {
    spec.validate()?;
    let (r1, z0, z1) = spec.extent()?;
    if !grid.contains_with_margin(r1, z0, z1, GRID_MARGIN_CELLS) {
        return Err(Error::Domain(format!(
            "surface extent r<={r1}, z in [{z0}, {z1}] does not fit the grid with {GRID_MARGIN_CELLS}-cell margin"
        )));
    }
    let field = match spec {
        SurfaceSpec::Sphere { center_z, radius } => {
            ScalarField::from_fn(*grid, |r, z| r.hypot(z - *center_z) - *radius)
        }
        SurfaceSpec::Torus { core_radius, tube_radius, center_z } => {
            ScalarField::from_fn(*grid, |r, z| (r - *core_radius).hypot(z - *center_z) - *tube_radius)
        }
        SurfaceSpec::Cylinder { radius, length, center_z } => {
            let half = *length * T::lit(0.5);
            ScalarField::from_fn(*grid, |r, z| {
                let dr = r - *radius;
                let dz = (z - *center_z).abs() - half;
                let outside = dr.max(T::zero()).hypot(dz.max(T::zero()));
                let inside = dr.max(dz).min(T::zero());
                outside + inside
            })
        }
        SurfaceSpec::OffsetOfProfile { .. } => {
            let curve = spec.offset_curve(grid.h * T::lit(0.25))?;
            polygon_distance(&curve, grid)
        }
    };
    Ok(field)
}

fn polygon_distance<T: Real>(curve: &ProfileCurve<T>, grid: &AxiGrid<T>) -> ScalarField<T> {
    let pos = curve.positions();
    let segs: Vec<_> = segments(&pos, curve.closed).collect();
    // open curves are closed along the axis for the inside test only
    let poly = pos.clone();
    ScalarField::from_fn(*grid, |r, z| {
        let d = segs
            .iter()
            .map(|&(a, b)| point_segment_distance((r, z), a, b))
            .fold(T::infinity(), T::min);
        if inside_polygon((r, z), &poly) { -d } else { d }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::grid::build_grid;

    #[test]
    fn torus_distance_values() {
        let g = build_grid(4.0f64, -2.0, 2.0, 0.0625).unwrap();
        let spec = SurfaceSpec::Torus { core_radius: 2.0, tube_radius: 0.5, center_z: 0.0 };
        let u = init_signed_distance(&spec, &g).unwrap();
        let zero_row = g.nz / 2;
        assert_eq!(u.at(32, zero_row), -0.5);
        assert_eq!(u.at(0, zero_row), 1.5);
    }

    #[test]
    fn sphere_distance_value() {
        let g = build_grid(3.0f64, -3.0, 3.0, 0.125).unwrap();
        let spec = SurfaceSpec::Sphere { center_z: 0.0, radius: 1.0 };
        let u = init_signed_distance(&spec, &g).unwrap();
        assert_eq!(u.at(0, 40), 1.0);
    }

    #[test]
    fn rejects_bad_specs() {
        let g = build_grid(3.0f64, -3.0, 3.0, 0.125).unwrap();
        let t = SurfaceSpec::Torus { core_radius: 1.0, tube_radius: 1.0, center_z: 0.0 };
        assert!(matches!(init_signed_distance(&t, &g), Err(Error::Config(_))));
        let big = SurfaceSpec::Sphere { center_z: 0.0, radius: 2.8 };
        assert!(matches!(init_signed_distance(&big, &g), Err(Error::Domain(_))));
    }

    #[test]
    fn capped_cylinder_signs() {
        let g = build_grid(2.0f64, -3.0, 3.0, 0.125).unwrap();
        let spec = SurfaceSpec::Cylinder { radius: 1.0, length: 4.0, center_z: 0.0 };
        let u = init_signed_distance(&spec, &g).unwrap();
        assert_eq!(u.at(0, 24), -1.0);
        assert!((u.at(8, 24)).abs() < 1e-12);
        // beyond the cap corner
        let (r, z) = (1.5, 2.5);
        let expected = (0.5f64).hypot(0.5);
        assert!((u.at((r / 0.125) as usize, ((z + 3.0) / 0.125) as usize) - expected).abs() < 1e-12);
    }

    #[test]
    fn offset_of_circle_profile_matches_torus() {
        let g = build_grid(4.0f64, -2.0, 2.0, 0.0625).unwrap();
        let n = 400;
        let pts: Vec<_> = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                (2.0 + 0.5 * a.cos(), 0.5 * a.sin())
            })
            .collect();
        let base = ProfileCurve::from_positions(&pts, true);
        let spec = SurfaceSpec::OffsetOfProfile { base, offset: 0.1, mode: 0, amplitude: 0.0 };
        let u = init_signed_distance(&spec, &g).unwrap();
        let exact = init_signed_distance(
            &SurfaceSpec::Torus { core_radius: 2.0, tube_radius: 0.6, center_z: 0.0 },
            &g,
        )
        .unwrap();
        // polygonal approximation of the circle: chord sag ~ (pi/n)^2 * 0.6 / 2
        assert!(u.max_abs_diff(&exact) < 1e-4, "{}", u.max_abs_diff(&exact));
    }
}
