use serde::{Deserialize, Serialize};

use super::grid::AxiGrid;
use crate::real::Real;

/// Level set function `u(r, z)` sampled on an [`AxiGrid`]. Negative values
/// are inside the evolving solid, positive values outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ScalarField<T: Real> {
    pub grid: AxiGrid<T>,
    pub values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn from_fn(grid: AxiGrid<T>, f: impl Fn(T, T) -> T) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (r, z) = grid.node(k);
                f(r, z)
            })
            .collect();
        Self { grid, values }
    }

    pub fn constant(grid: AxiGrid<T>, c: T) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[self.grid.idx(i, j)]
    }

    /// Value at a possibly out-of-range node: even reflection across the
    /// axis and across the outer boundaries (homogeneous Neumann).
    #[inline]
    pub fn ghost(&self, i: isize, j: isize) -> T {
        let (w, hgt) = (self.grid.width() as isize, self.grid.height() as isize);
        let i = reflect(i, w);
        let j = reflect(j, hgt);
        self.values[(j * w + i) as usize]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn has_interface(&self) -> bool {
        let any_neg = self.values.iter().any(|&v| v < T::zero());
        let any_pos = self.values.iter().any(|&v| v >= T::zero());
        any_neg && any_pos
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Central-difference gradient `(u_r, u_z)` at a node.
    pub fn gradient(&self, i: usize, j: usize) -> (T, T) {
        let (i, j) = (i as isize, j as isize);
        let two_h = self.grid.h + self.grid.h;
        let ur = if i == 0 {
            T::zero()
        } else {
            (self.ghost(i + 1, j) - self.ghost(i - 1, j)) / two_h
        };
        let uz = (self.ghost(i, j + 1) - self.ghost(i, j - 1)) / two_h;
        (ur, uz)
    }

    /// Bilinear interpolation at a half-plane point; points with `r < 0` are
    /// mirrored, points outside the box are clamped to it.
    pub fn sample(&self, r: T, z: T) -> T {
        let g = &self.grid;
        let fr = (r.abs() / g.h).min(T::from_usize_lossy(g.nr));
        let fz = ((z - g.z_min) / g.h).max(T::zero()).min(T::from_usize_lossy(g.nz));
        let i0 = fr.floor().to_usize().unwrap_or(0).min(g.nr.saturating_sub(1));
        let j0 = fz.floor().to_usize().unwrap_or(0).min(g.nz.saturating_sub(1));
        let tr = fr - T::from_usize_lossy(i0);
        let tz = fz - T::from_usize_lossy(j0);
        let v00 = self.at(i0, j0);
        let v10 = self.at(i0 + 1, j0);
        let v01 = self.at(i0, j0 + 1);
        let v11 = self.at(i0 + 1, j0 + 1);
        let one = T::one();
        (one - tr) * (one - tz) * v00 + tr * (one - tz) * v10 + (one - tr) * tz * v01 + tr * tz * v11
    }

    /// Tensor-product cubic Lagrange interpolant on the 4x4 stencil around the
    /// cell containing `(r, z)`, with its gradient. Accepts `r < 0` through
    /// the axis symmetry.
    pub fn cubic(&self, r: T, z: T) -> (T, T, T) {
        let g = &self.grid;
        let fr = r / g.h;
        let fz = (z - g.z_min) / g.h;
        let i0 = fr.floor();
        let j0 = fz.floor();
        let tr = fr - i0;
        let tz = fz - j0;
        let i0 = i0.to_isize().unwrap_or(0);
        let j0 = j0.to_isize().unwrap_or(0);
        let (wr, dwr) = lagrange4(tr);
        let (wz, dwz) = lagrange4(tz);
        let mut v = T::zero();
        let mut vr = T::zero();
        let mut vz = T::zero();
        for (b, (&wzb, &dwzb)) in wz.iter().zip(&dwz).enumerate() {
            let jj = j0 - 1 + b as isize;
            for (a, (&wra, &dwra)) in wr.iter().zip(&dwr).enumerate() {
                let ii = (i0 - 1 + a as isize).abs();
                let u = self.ghost_signed(ii, jj);
                v += wra * wzb * u;
                vr += dwra * wzb * u;
                vz += wra * dwzb * u;
            }
        }
        (v, vr / g.h, vz / g.h)
    }

    // Like `ghost` but the outer boundaries extrapolate linearly, which keeps
    // the cubic stencil consistent for distance-like data near the box edge.
    fn ghost_signed(&self, i: isize, j: isize) -> T {
        let (w, hgt) = (self.grid.width() as isize, self.grid.height() as isize);
        let ic = i.clamp(0, w - 1);
        let jc = j.clamp(0, hgt - 1);
        let base = self.values[(jc * w + ic) as usize];
        let mut extra = T::zero();
        if i != ic {
            let inner = self.values[(jc * w + (2 * ic - i).clamp(0, w - 1)) as usize];
            extra += base - inner;
        }
        if j != jc {
            let inner = self.values[((2 * jc - j).clamp(0, hgt - 1) * w + ic) as usize];
            extra += base - inner;
        }
        base + extra
    }
}

#[inline]
fn reflect(i: isize, n: isize) -> isize {
    if i < 0 {
        (-i).min(n - 1)
    } else if i >= n {
        (2 * (n - 1) - i).max(0)
    } else {
        i
    }
}

// Cubic Lagrange weights on nodes -1, 0, 1, 2 and their derivatives.
fn lagrange4<T: Real>(t: T) -> ([T; 4], [T; 4]) {
    let one = T::one();
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let (tm1, tm2, tp1) = (t - one, t - two, t + one);
    let w = [
        -t * tm1 * tm2 / six,
        tp1 * tm1 * tm2 / two,
        -tp1 * t * tm2 / two,
        tp1 * t * tm1 / six,
    ];
    // derivative of each product of three linear factors
    let d3 = |a: T, b: T, c: T| a * b + a * c + b * c;
    let dw = [
        -d3(t, tm1, tm2) / six,
        d3(tp1, tm1, tm2) / two,
        -d3(tp1, t, tm2) / two,
        d3(tp1, t, tm1) / six,
    ];
    (w, dw)
}
