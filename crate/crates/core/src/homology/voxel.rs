use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::complex::CubicalComplex;
use super::reduce::betti_numbers;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::real::Real;

/// Largest lattice size per axis accepted by the voxelizers.
pub const MAX_VOXELS_PER_AXIS: usize = 64;

/// Axis-aligned box `[-half_width, half_width]^2 x [z_min, z_max]` around the
/// rotation axis (the `z` axis).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoxelBox {
    pub half_width: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl VoxelBox {
    /// Box around the inside region of `field` with a margin of three voxels
    /// and at least two grid spacings on every side. Falls back to the whole
    /// grid when the field has no inside nodes.
    pub fn fit<T: Real>(field: &ScalarField<T>, n: usize) -> Self {
        let g = &field.grid;
        let h = g.h.to_f64_lossy();
        let (mut rmax, mut zlo, mut zhi) = (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..g.len() {
            if field.values[k] < T::zero() {
                let (r, z) = g.node(k);
                rmax = rmax.max(r.to_f64_lossy());
                zlo = zlo.min(z.to_f64_lossy());
                zhi = zhi.max(z.to_f64_lossy());
            }
        }
        if rmax == f64::NEG_INFINITY {
            return Self { half_width: g.r_max.to_f64_lossy(), z_min: g.z_min.to_f64_lossy(), z_max: g.z_max.to_f64_lossy() };
        }
        let (w0, zh0) = (rmax + h, 0.5 * (zhi - zlo) + h);
        // a margin of m voxels on each side: extent = inner + 2 m extent / n
        let grow = |inner: f64| inner * n as f64 / (n as f64 - 6.0).max(1.0) + 2.0 * h;
        let half_width = grow(w0);
        let half_z = grow(zh0);
        let zc = 0.5 * (zhi + zlo);
        Self { half_width, z_min: zc - half_z, z_max: zc + half_z }
    }

    pub fn spacing(&self, n: usize) -> [f64; 3] {
        let s = 2.0 * self.half_width / n as f64;
        [s, s, (self.z_max - self.z_min) / n as f64]
    }

    /// Center of voxel `(i, j, k)` in an `n^3` lattice.
    pub fn center(&self, n: usize, i: usize, j: usize, k: usize) -> [f64; 3] {
        let s = self.spacing(n);
        [
            -self.half_width + (i as f64 + 0.5) * s[0],
            -self.half_width + (j as f64 + 0.5) * s[1],
            self.z_min + (k as f64 + 0.5) * s[2],
        ]
    }
}

/// Occupancy mask over an `n^3` voxel lattice, `x` fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoxelRegion {
    pub n: usize,
    pub bbox: VoxelBox,
    pub mask: Vec<bool>,
}

impl VoxelRegion {
    pub fn empty(n: usize, bbox: VoxelBox) -> Self {
        Self { n, bbox, mask: vec![false; n * n * n] }
    }

    /// Voxels whose center satisfies `inside`.
    pub fn from_fn(n: usize, bbox: VoxelBox, inside: impl Fn([f64; 3]) -> bool) -> Result<Self> {
        check_resolution(n)?;
        let mut mask = vec![false; n * n * n];
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    mask[(k * n + j) * n + i] = inside(bbox.center(n, i, j, k));
                }
            }
        }
        Ok(Self { n, bbox, mask })
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.n + j) * self.n + i
    }

    #[inline]
    pub fn coords(&self, v: usize) -> [usize; 3] {
        [v % self.n, v / self.n % self.n, v / (self.n * self.n)]
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n; 3]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_lattice(other)?;
        Ok(Self { n: self.n, bbox: self.bbox, mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect() })
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).any(|(a, b)| *a && *b)
    }

    pub(crate) fn same_lattice(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Argument(format!("lattice sizes differ: {} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn complex(&self) -> CubicalComplex {
        CubicalComplex::new(&self.dims(), &self.mask)
    }

    /// Voxel in the mask nearest to the point `p`.
    pub fn nearest(&self, p: [f64; 3]) -> Option<usize> {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for v in (0..self.mask.len()).filter(|&v| self.mask[v]) {
            let [i, j, k] = self.coords(v);
            let c = self.bbox.center(self.n, i, j, k);
            let d = (c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2) + (c[2] - p[2]).powi(2);
            if d < best_d {
                best_d = d;
                best = Some(v);
            }
        }
        best
    }

    /// Shortest face-adjacent path from `a` to `b` inside the mask.
    pub fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let n = self.n;
        let mut prev = vec![usize::MAX; self.mask.len()];
        let mut queue = VecDeque::from([a]);
        prev[a] = a;
        while let Some(v) = queue.pop_front() {
            if v == b {
                let mut out = vec![b];
                let mut c = b;
                while c != a {
                    c = prev[c];
                    out.push(c);
                }
                out.reverse();
                return Some(out);
            }
            let [i, j, k] = self.coords(v);
            let steps = [(i > 0, v.wrapping_sub(1)), (i + 1 < n, v + 1), (j > 0, v.wrapping_sub(n)), (j + 1 < n, v + n), (k > 0, v.wrapping_sub(n * n)), (k + 1 < n, v + n * n)];
            for (ok, w) in steps {
                if ok && self.mask[w] && prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

pub(crate) fn check_resolution(n: usize) -> Result<()> {
    if n > MAX_VOXELS_PER_AXIS {
        return Err(Error::Resource(format!("voxel resolution {n} exceeds {MAX_VOXELS_PER_AXIS}")));
    }
    if n < 2 {
        return Err(Error::Argument(format!("voxel resolution {n} is too small")));
    }
    Ok(())
}

/// Revolves a half-plane frame into `n^3` voxels over the fitted box and
/// splits them into inside and outside cells.
pub fn voxelize_revolution<T: Real>(field: &ScalarField<T>, n: usize) -> Result<(VoxelRegion, VoxelRegion)> {
    check_resolution(n)?;
    voxelize_revolution_in(field, VoxelBox::fit(field, n), n)
}

/// As [`voxelize_revolution`] over a given box. A voxel belongs to the inside
/// region when the field at the `(r, z)` of its center is below `-h/2`, and to
/// the outside region when it is above `h/2`, with `h` the spacing of the
/// field's grid. Voxels in between are crossed by the surface and belong to
/// neither.
pub fn voxelize_revolution_in<T: Real>(field: &ScalarField<T>, bbox: VoxelBox, n: usize) -> Result<(VoxelRegion, VoxelRegion)> {
    check_resolution(n)?;
    let half = 0.5 * field.grid.h.to_f64_lossy();
    let mut w_in = VoxelRegion::empty(n, bbox);
    let mut w_out = VoxelRegion::empty(n, bbox);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let c = bbox.center(n, i, j, k);
                let r = c[0].hypot(c[1]);
                let u = field.sample(T::lit(r), T::lit(c[2])).to_f64_lossy();
                let v = w_in.index(i, j, k);
                if u < -half {
                    w_in.mask[v] = true;
                } else if u > half {
                    w_out.mask[v] = true;
                }
            }
        }
    }
    Ok((w_in, w_out))
}

/// First Betti number of a voxel region over Z/2, from the ranks of the
/// boundary matrices. An empty region has rank 0.
pub fn betti1(region: &VoxelRegion) -> usize {
    if region.is_empty() {
        return 0;
    }
    betti_numbers(&region.complex())[1]
}

/// `b1(W) = b1(W_in) + b1(W_out)`: the two parts are never face adjacent.
pub fn betti1_complement(w_in: &VoxelRegion, w_out: &VoxelRegion) -> usize {
    betti1(w_in) + betti1(w_out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub ranks: Vec<usize>,
    /// First pair of consecutive frames where the rank increased.
    pub violation: Option<(usize, usize)>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks that `b1` of the complement masks never increases along a run.
/// Each entry is the pair `(W_in, W_out)` of one frame.
pub fn check_h1_monotonicity(frames: &[(VoxelRegion, VoxelRegion)]) -> Result<MonotonicityReport> {
    if frames.len() < 2 {
        return Err(Error::Argument("monotonicity needs at least two frames".into()));
    }
    let ranks: Vec<usize> = frames.iter().map(|(a, b)| betti1_complement(a, b)).collect();
    let violation = ranks.windows(2).position(|w| w[1] > w[0]).map(|i| (i, i + 1));
    Ok(MonotonicityReport { ranks, violation })
}
