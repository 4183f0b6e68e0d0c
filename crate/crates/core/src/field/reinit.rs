use super::scalar::ScalarField;
use crate::error::{Error, Result};
use crate::real::Real;

/// Half-width of the reinitialized band, in cells. Values farther from the
/// zero set are clamped to `+/- REINIT_BAND_CELLS * h`.
pub const REINIT_BAND_CELLS: usize = 6;

const NEWTON_MAX_ITERS: usize = 30;

/// Restores `|grad u| = 1` near the zero set without moving it.
///
/// Every node within the band is replaced by its signed distance to the zero
/// set of the cubic interpolant of `u`, found by Newton projection in the
/// meridian plane (the axis symmetry is built into the interpolant, so the
/// closest point may lie across the axis). Nodes outside the band are clamped.
pub fn reinitialize<T: Real>(field: &ScalarField<T>) -> Result<ScalarField<T>> {
    let (out, _) = reinitialize_banded(field, REINIT_BAND_CELLS)?;
    Ok(out)
}

/// Reinitializes and returns the indices of all nodes within `active_cells`
/// (Chebyshev) cells of a sign change, sorted.
pub(crate) fn reinitialize_banded<T: Real>(
    field: &ScalarField<T>,
    active_cells: usize,
) -> Result<(ScalarField<T>, Vec<usize>)> {
    let g = field.grid;
    let interface = interface_nodes(field);
    if interface.is_empty() {
        return Err(Error::Extinct);
    }
    let reach = active_cells.max(REINIT_BAND_CELLS + 1);
    let dist_cells = chebyshev_distance(field, &interface, reach);
    let cap = T::from_usize_lossy(REINIT_BAND_CELLS) * g.h;
    let mut values = Vec::with_capacity(g.len());
    let mut active = Vec::new();
    let mut crossings = None;
    for (k, &u) in field.values.iter().enumerate() {
        let sign = if u < T::zero() { -T::one() } else { T::one() };
        let dc = dist_cells[k];
        if dc as usize <= reach {
            if (dc as usize) <= active_cells {
                active.push(k);
            }
        }
        if dc as usize <= REINIT_BAND_CELLS + 1 {
            let (r, z) = g.node(k);
            // a crossing is at least dc - 1 cells away, so the outer ring is at the cap anyway
            let d = closest_distance(field, r, z).unwrap_or_else(|| {
                if dc as usize > REINIT_BAND_CELLS {
                    return cap;
                }
                let (i, j) = g.ij(k);
                match crossings.get_or_insert_with(|| Crossings::new(field)).nearest(&g, i, j) {
                    Some((d, c)) => closest_distance_from(field, r, z, c).map_or(d, |n| n.min(d)),
                    None => cap,
                }
            });
            values.push(sign * d.min(cap));
        } else {
            values.push(sign * cap);
        }
    }
    Ok((ScalarField { grid: g, values }, active))
}

/// Nodes that are an endpoint of a grid edge across which `u` changes sign.
pub(crate) fn interface_nodes<T: Real>(field: &ScalarField<T>) -> Vec<usize> {
    let g = field.grid;
    let neg = |k: usize| field.values[k] < T::zero();
    let mut mark = vec![false; g.len()];
    for j in 0..g.height() {
        for i in 0..g.width() {
            let k = g.idx(i, j);
            if i + 1 < g.width() && neg(k) != neg(k + 1) {
                mark[k] = true;
                mark[k + 1] = true;
            }
            if j + 1 < g.height() && neg(k) != neg(k + g.width()) {
                mark[k] = true;
                mark[k + g.width()] = true;
            }
        }
    }
    (0..g.len()).filter(|&k| mark[k]).collect()
}

// Chebyshev cell distance to the nearest seed, saturated at `reach + 1`.
fn chebyshev_distance<T: Real>(field: &ScalarField<T>, seeds: &[usize], reach: usize) -> Vec<u16> {
    let g = field.grid;
    let far = (reach + 1) as u16;
    let mut d = vec![far; g.len()];
    let (w, hgt) = (g.width() as isize, g.height() as isize);
    let reach = reach as isize;
    for &k in seeds {
        let (i0, j0) = g.ij(k);
        let (i0, j0) = (i0 as isize, j0 as isize);
        for j in (j0 - reach).max(0)..=(j0 + reach).min(hgt - 1) {
            for i in (i0 - reach).max(0)..=(i0 + reach).min(w - 1) {
                let c = (i - i0).abs().max((j - j0).abs()) as u16;
                let slot = &mut d[(j * w + i) as usize];
                if c < *slot {
                    *slot = c;
                }
            }
        }
    }
    d
}

/// Distance from `(r, z)` to the zero set of the cubic interpolant, by
/// Newton projection. `None` when the iteration does not settle nearby.
pub(crate) fn closest_distance<T: Real>(field: &ScalarField<T>, r: T, z: T) -> Option<T> {
    closest_distance_from(field, r, z, (r, z))
}

fn closest_distance_from<T: Real>(field: &ScalarField<T>, r: T, z: T, start: (T, T)) -> Option<T> {
    let h = field.grid.h;
    let tol = T::lit(1e-9).max(T::epsilon() * T::lit(64.0)) * h;
    let far = h * T::lit(12.0);
    let (mut yr, mut yz) = start;
    for _ in 0..NEWTON_MAX_ITERS {
        let (p, gr, gz) = field.cubic(yr, yz);
        let g2 = gr * gr + gz * gz;
        if !(g2 > T::lit(1e-20)) {
            return None;
        }
        let d1r = -p * gr / g2;
        let d1z = -p * gz / g2;
        let (xr, xz) = (r - yr, z - yz);
        let proj = (xr * gr + xz * gz) / g2;
        let d2r = xr - proj * gr;
        let d2z = xz - proj * gz;
        yr += d1r + d2r;
        yz += d1z + d2z;
        if (r - yr).hypot(z - yz) > far {
            return None;
        }
        // a tangential miss changes the distance only to second order; the
        // mirrored stencil leaves a tiny kink at the axis that keeps it from
        // settling below roundoff there
        if d1r.abs() + d1z.abs() < tol && d2r.abs() + d2z.abs() < h * T::lit(1e-4) {
            let d = (r - yr).hypot(z - yz);
            return if d <= far { Some(d) } else { None };
        }
    }
    None
}

const TILE: usize = REINIT_BAND_CELLS + 2;

// Sign changes on grid edges, located by linear interpolation along the
// edge and binned into square tiles of `TILE` cells. Newton from the
// nearest one covers the nodes where the projection from the node itself
// cannot start: a critical point of `u`, such as a node on the axis in the
// middle of a closing hole, or the flat clamped plateau at the band edge.
struct Crossings<T> {
    tiles_r: usize,
    tiles: Vec<Vec<(T, T)>>,
}

impl<T: Real> Crossings<T> {
    fn new(field: &ScalarField<T>) -> Self {
        let g = field.grid;
        let (w, hgt) = (g.width(), g.height());
        let tiles_r = w.div_ceil(TILE);
        let mut tiles = vec![Vec::new(); tiles_r * hgt.div_ceil(TILE)];
        let mut push = |a: usize, b: usize| {
            let (ua, ub) = (field.values[a], field.values[b]);
            if (ua < T::zero()) == (ub < T::zero()) {
                return;
            }
            let t = ua / (ua - ub);
            let (pa, pb) = (g.node(a), g.node(b));
            let (i, j) = g.ij(a);
            tiles[(j / TILE) * tiles_r + i / TILE].push((pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)));
        };
        for j in 0..hgt {
            for i in 0..w {
                let a = g.idx(i, j);
                if i + 1 < w {
                    push(a, a + 1);
                }
                if j + 1 < hgt {
                    push(a, a + w);
                }
            }
        }
        Self { tiles_r, tiles }
    }

    // nearest crossing among the tiles around node (i, j); exact for crossings within TILE - 1 cells
    fn nearest(&self, g: &super::grid::AxiGrid<T>, i: usize, j: usize) -> Option<(T, (T, T))> {
        let (ti, tj) = (i / TILE, j / TILE);
        let tiles_z = self.tiles.len() / self.tiles_r;
        let (r, z) = (g.r(i), g.z(j));
        let mut best: Option<(T, (T, T))> = None;
        for b in tj.saturating_sub(1)..=(tj + 1).min(tiles_z - 1) {
            for a in ti.saturating_sub(1)..=(ti + 1).min(self.tiles_r - 1) {
                for &c in &self.tiles[b * self.tiles_r + a] {
                    let d = (c.0 - r).hypot(c.1 - z);
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, c));
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::grid::build_grid;
    use crate::field::surface::{init_signed_distance, SurfaceSpec};

    fn sphere(h: f64) -> ScalarField<f64> {
        let g = build_grid(2.0f64, -2.0, 2.0, h).unwrap();
        init_signed_distance(&SurfaceSpec::Sphere { center_z: 0.0, radius: 1.0 }, &g).unwrap()
    }

    fn band(field: &ScalarField<f64>, cells: f64) -> Vec<usize> {
        let h = field.grid.h;
        (0..field.grid.len()).filter(|&k| field.values[k].abs() <= cells * h).collect()
    }

    #[test]
    fn exact_distance_is_a_fixed_point() {
        let u = sphere(1.0 / 64.0);
        let v = reinitialize(&u).unwrap();
        for k in band(&u, 6.0) {
            assert!((u.values[k] - v.values[k]).abs() < 1e-6, "node {k}: {} vs {}", u.values[k], v.values[k]);
        }
    }

    #[test]
    fn doubled_distance_is_restored() {
        let u = sphere(1.0 / 64.0);
        let doubled = u.map(|x| 2.0 * x);
        let v = reinitialize(&doubled).unwrap();
        let h = u.grid.h;
        for k in band(&u, 6.0) {
            assert!((u.values[k] - v.values[k]).abs() < h);
        }
    }

    #[test]
    fn gradient_near_one_in_band() {
        let g = build_grid(4.0f64, -2.0, 2.0, 1.0 / 32.0).unwrap();
        let u = init_signed_distance(&SurfaceSpec::Torus { core_radius: 2.0, tube_radius: 0.5, center_z: 0.0 }, &g)
            .unwrap()
            .map(|x| x * (1.0 + 0.5 * x));
        let v = reinitialize(&u).unwrap();
        for k in band(&v, 3.0) {
            let (i, j) = g.ij(k);
            if i == 0 {
                continue;
            }
            let (ur, uz) = v.gradient(i, j);
            let n = ur.hypot(uz);
            assert!((0.9..=1.1).contains(&n), "|grad u| = {n} at {:?}", g.node(k));
        }
    }

    #[test]
    fn critical_nodes_get_their_distance() {
        // the axis node at z = 0 sits in the middle of the hole, the node at
        // (2, 0) in the middle of the tube; u has a critical point at both
        let h = 1.0 / 32.0;
        let g = build_grid(3.0f64, -1.0, 1.0, h).unwrap();
        let u = init_signed_distance(&SurfaceSpec::Torus { core_radius: 2.0, tube_radius: 0.1, center_z: 0.0 }, &g).unwrap();
        let v = reinitialize(&u).unwrap();
        let k = g.idx(64, 32);
        assert!((v.values[k] + 0.1).abs() < 1e-3, "{}", v.values[k]);
        let g = build_grid(2.0f64, -1.5, 1.5, h).unwrap();
        let u = init_signed_distance(&SurfaceSpec::Torus { core_radius: 0.9, tube_radius: 0.8, center_z: 0.0 }, &g).unwrap();
        let v = reinitialize(&u).unwrap();
        let k = g.idx(0, g.height() / 2);
        assert!((v.values[k] - 0.1).abs() < 1e-3, "{}", v.values[k]);
    }

    #[test]
    fn all_positive_field_is_extinct() {
        let g = build_grid(1.0f64, -1.0, 1.0, 0.125).unwrap();
        let u = ScalarField::constant(g, 1.0);
        assert!(matches!(reinitialize(&u), Err(Error::Extinct)));
    }

    #[test]
    fn idempotent() {
        let u = sphere(1.0 / 32.0).map(|x| x + 0.3 * x * x);
        let v = reinitialize(&u).unwrap();
        let w = reinitialize(&v).unwrap();
        for k in band(&v, 4.0) {
            assert!((v.values[k] - w.values[k]).abs() < 1e-3, "{} {} at {:?}", v.values[k], w.values[k], v.grid.node(k));
        }
    }
}
