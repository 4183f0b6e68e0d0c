use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Uniform node grid on the half-plane `{(r, z) : r >= 0}` of a surface of
/// revolution. Node `(i, j)` sits at `r = i h`, `z = z_min + j h`, so the
/// rotation axis is the grid line `i = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AxiGrid<T: Real> {
    pub r_max: T,
    pub z_min: T,
    pub z_max: T,
    pub h: T,
    /// Cell counts; there are `nr + 1` node columns and `nz + 1` node rows.
    pub nr: usize,
    pub nz: usize,
}

impl<T: Real> AxiGrid<T> {
    pub fn new(r_max: T, z_min: T, z_max: T, h: T) -> Result<Self> {
        if !(r_max > T::zero()) || !(h > T::zero()) || !(z_max > z_min) {
            return Err(Error::Config(format!(
                "grid extents must be positive: r_max={r_max}, z=[{z_min}, {z_max}], h={h}"
            )));
        }
        let nr = count_cells(r_max, h)?;
        let nz = count_cells(z_max - z_min, h)?;
        Ok(Self { r_max, z_min, z_max, h, nr, nz })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.nr + 1
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.nz + 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.width() + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.width(), k / self.width())
    }

    #[inline]
    pub fn r(&self, i: usize) -> T {
        T::from_usize_lossy(i) * self.h
    }

    #[inline]
    pub fn z(&self, j: usize) -> T {
        self.z_min + T::from_usize_lossy(j) * self.h
    }

    #[inline]
    pub fn node(&self, k: usize) -> (T, T) {
        let (i, j) = self.ij(k);
        (self.r(i), self.z(j))
    }

    /// Whether the box `[0, r_hi] x [z_lo, z_hi]` sits inside the grid with
    /// at least `margin` cells of clearance from the outer boundaries.
    pub fn contains_with_margin(&self, r_hi: T, z_lo: T, z_hi: T, margin: usize) -> bool {
        let m = T::from_usize_lossy(margin) * self.h;
        r_hi + m <= self.r_max && z_lo - m >= self.z_min && z_hi + m <= self.z_max
    }

    /// Same extents at a different spacing.
    pub fn refined(&self, h: T) -> Result<Self> {
        Self::new(self.r_max, self.z_min, self.z_max, h)
    }
}

fn count_cells<T: Real>(extent: T, h: T) -> Result<usize> {
    let n = (extent / h).round();
    let tol = T::lit(1e-6) * (extent / h).max(T::one());
    if n < T::one() || ((extent / h) - n).abs() > tol {
        return Err(Error::Config(format!(
            "spacing {h} does not divide extent {extent}"
        )));
    }
    n.to_usize()
        .ok_or_else(|| Error::Config(format!("cell count for extent {extent} overflows")))
}

/// Builds a grid, validating extents and spacing.
pub fn build_grid<T: Real>(r_max: T, z_min: T, z_max: T, h: T) -> Result<AxiGrid<T>> {
    AxiGrid::new(r_max, z_min, z_max, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts() {
        let g = build_grid(4.0f64, -4.0, 4.0, 0.0625).unwrap();
        assert_eq!((g.nr, g.nz), (64, 128));
        let g = build_grid(1.0f64, 0.0, 1.0, 0.5).unwrap();
        assert_eq!((g.nr, g.nz), (2, 2));
        assert_eq!(g.len(), 9);
    }

    #[test]
    fn rejects_bad_extents() {
        assert!(matches!(build_grid(-1.0f64, 0.0, 1.0, 0.1), Err(Error::Config(_))));
        assert!(build_grid(1.0f64, 1.0, 1.0, 0.1).is_err());
        assert!(build_grid(1.0f64, 0.0, 1.0, 0.0).is_err());
        assert!(build_grid(1.0f64, 0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn axis_is_a_grid_line() {
        let g = build_grid(2.0f32, -1.0, 1.0, 0.25).unwrap();
        assert_eq!(g.r(0), 0.0);
        assert_eq!(g.r(g.nr), 2.0);
        assert_eq!(g.z(g.nz), 1.0);
        let k = g.idx(3, 5);
        assert_eq!(g.ij(k), (3, 5));
    }
}
