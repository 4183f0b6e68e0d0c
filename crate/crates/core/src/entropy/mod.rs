//! Gaussian densities and entropy of surfaces of revolution.
//!
//! The density of the surface generated by a profile, at center `x0` with
//! `x0` at distance `a` from the axis and height `z0`, and scale `t0`, is
//!
//! `(4 pi t0)^-1 * integral 2 pi r exp(-((r - a)^2 + (z - z0)^2) / (4 t0)) i0e(r a / (2 t0)) ds`
//!
//! where `i0e(x) = exp(-x) I0(x)` carries the azimuthal integral.

mod bessel;

pub use bessel::{i0, i0e};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::ProfileCurve;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DensityQuery<T: Real> {
    pub a: T,
    pub z0: T,
    pub t0: T,
}

impl<T: Real> DensityQuery<T> {
    pub fn new(a: T, z0: T, t0: T) -> Self {
        Self { a, z0, t0 }
    }
}

/// Density of the surface generated by all `curves` together.
pub fn density<T: Real>(curves: &[ProfileCurve<T>], q: DensityQuery<T>) -> Result<T> {
    if !(q.t0 > T::zero()) {
        return Err(Error::Argument(format!("t0 must be positive, got {}", q.t0)));
    }
    if q.a < T::zero() {
        return Err(Error::Argument(format!("a must be non-negative, got {}", q.a)));
    }
    Ok(density_unchecked(curves, q))
}

fn density_unchecked<T: Real>(curves: &[ProfileCurve<T>], q: DensityQuery<T>) -> T {
    let four_t = T::lit(4.0) * q.t0;
    let two_t = T::lit(2.0) * q.t0;
    let kernel = |p: (T, T)| {
        let (dr, dz) = (p.0 - q.a, p.1 - q.z0);
        p.0 * (-(dr * dr + dz * dz) / four_t).exp() * i0e(p.0 * q.a / two_t)
    };
    // chords longer than a quarter of the kernel width are subdivided
    let max_ds = q.t0.sqrt() * T::lit(0.25);
    let mut sum = T::zero();
    for c in curves {
        let pts = c.positions();
        let n = pts.len();
        if n < 2 {
            continue;
        }
        let segs = if c.closed { n } else { n - 1 };
        for k in 0..segs {
            let (p, q2) = (pts[k], pts[(k + 1) % n]);
            let len = (q2.0 - p.0).hypot(q2.1 - p.1);
            let m = (len / max_ds).ceil().to_usize().unwrap_or(1).max(1);
            let ds = len / T::from_usize_lossy(m);
            let mut prev = kernel(p);
            for i in 1..=m {
                let t = T::from_usize_lossy(i) / T::from_usize_lossy(m);
                let x = (p.0 + t * (q2.0 - p.0), p.1 + t * (q2.1 - p.1));
                let cur = kernel(x);
                sum += (prev + cur) * ds * T::lit(0.5);
                prev = cur;
            }
        }
    }
    // (4 pi t0)^-1 * 2 pi = 1 / (2 t0)
    sum / two_t
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TraceStep<T: Real> {
    /// 0 for the coarse grid, then the restart number counted from 1.
    pub restart: usize,
    pub iteration: usize,
    pub query: DensityQuery<T>,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EntropyResult<T: Real> {
    pub value: T,
    pub argmax: DensityQuery<T>,
    pub evaluations: usize,
    pub trace: Vec<TraceStep<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EntropyOptions<T: Real> {
    pub grid: usize,
    pub t0_min: T,
    pub t0_max: T,
    pub ascent_steps: usize,
    pub restarts: usize,
}

impl<T: Real> Default for EntropyOptions<T> {
    fn default() -> Self {
        Self { grid: 16, t0_min: T::lit(1e-3), t0_max: T::lit(1e2), ascent_steps: 200, restarts: 4 }
    }
}

/// Entropy with the default search.
pub fn entropy<T: Real>(curves: &[ProfileCurve<T>]) -> Result<EntropyResult<T>> {
    entropy_with(curves, &EntropyOptions::default())
}

/// Supremum of the density over centers and scales: a coarse grid over
/// `(a, z0, log t0)` spanning the bounding box, then coordinate ascent with
/// shrinking steps from the best grid cells.
pub fn entropy_with<T: Real>(curves: &[ProfileCurve<T>], opts: &EntropyOptions<T>) -> Result<EntropyResult<T>> {
    if curves.iter().all(|c| c.len() < 2) {
        return Err(Error::Argument("no profile samples".into()));
    }
    if opts.grid < 2 || !(opts.t0_min > T::zero() && opts.t0_max > opts.t0_min) {
        return Err(Error::Config("bad entropy search options".into()));
    }
    let (mut rmax, mut zmin, mut zmax) = (T::zero(), T::infinity(), T::neg_infinity());
    for c in curves.iter().filter(|c| !c.is_empty()) {
        let (_, r1, z0, z1) = c.bounding_box();
        rmax = rmax.max(r1);
        zmin = zmin.min(z0);
        zmax = zmax.max(z1);
    }
    let n = opts.grid;
    let lerp = |lo: T, hi: T, k: usize| lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1);
    let (lt_lo, lt_hi) = (opts.t0_min.ln(), opts.t0_max.ln());
    let cells: Vec<(usize, usize, usize)> =
        (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k)))).collect();
    let query = |&(i, j, k): &(usize, usize, usize)| {
        DensityQuery::new(lerp(T::zero(), rmax, i), lerp(zmin, zmax, j), lerp(lt_lo, lt_hi, k).exp())
    };
    let values: Vec<T> = cells.par_iter().map(|c| density_unchecked(curves, query(c))).collect();
    let mut evaluations = values.len();
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&x, &y| values[y].partial_cmp(&values[x]).unwrap_or(std::cmp::Ordering::Equal).then(x.cmp(&y)));

    let mut trace = Vec::new();
    let best0 = order[0];
    let mut best = (values[best0], query(&cells[best0]));
    trace.push(TraceStep { restart: 0, iteration: 0, query: best.1, value: best.0 });

    let steps0 = [rmax / T::from_usize_lossy(n - 1), (zmax - zmin) / T::from_usize_lossy(n - 1), (lt_hi - lt_lo) / T::from_usize_lossy(n - 1)];
    let floor = T::lit(1e-9);
    for (restart, &cell) in order.iter().take(opts.restarts).enumerate() {
        let mut x = [query(&cells[cell]).a, query(&cells[cell]).z0, query(&cells[cell]).t0.ln()];
        let mut fx = values[cell];
        let mut step = steps0.map(|s| s.max(floor));
        for it in 1..=opts.ascent_steps {
            let mut moved = false;
            for d in 0..3 {
                for sgn in [T::one(), -T::one()] {
                    let mut y = x;
                    y[d] += sgn * step[d];
                    y[0] = y[0].max(T::zero());
                    y[2] = y[2].max(lt_lo).min(lt_hi);
                    if y == x {
                        continue;
                    }
                    let fy = density_unchecked(curves, DensityQuery::new(y[0], y[1], y[2].exp()));
                    evaluations += 1;
                    if fy > fx {
                        x = y;
                        fx = fy;
                        moved = true;
                        break;
                    }
                }
            }
            let q = DensityQuery::new(x[0], x[1], x[2].exp());
            if moved {
                trace.push(TraceStep { restart: restart + 1, iteration: it, query: q, value: fx });
            } else {
                step = step.map(|s| s * T::lit(0.5));
                if step.iter().all(|&s| s < floor) {
                    break;
                }
            }
        }
        if fx > best.0 {
            best = (fx, DensityQuery::new(x[0], x[1], x[2].exp()));
        }
    }
    Ok(EntropyResult { value: best.0, argmax: best.1, evaluations, trace })
}
