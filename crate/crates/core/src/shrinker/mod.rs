//! Rotationally symmetric self-shrinkers by shooting on the profile ODE,
//! and their Gaussian areas.
//!
//! A profile `(r(s), z(s))` parametrized by arclength with tangent angle
//! `theta` generates a shrinker iff
//!
//! `theta' = (r sin(theta) - z cos(theta)) / 2 - sin(theta) / r`.
//!
//! The equation is unchanged when the orientation is reversed, and the
//! round sphere of radius 2 through `(2, 0)` has `theta' = 1/2`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{ProfileCurve, ProfilePoint};
use crate::real::Real;

/// Fixed arclength step of the integrator.
pub const STEP: f64 = 1e-3;
// below this distance from the axis the step shrinks geometrically
const AXIS_SLOW: f64 = 0.05;
// where an approach to the axis is judged
const AXIS_STOP: f64 = 1e-5;
// |sin(theta)| extrapolated to the axis above which the hit is a crossing
const AXIS_PERPENDICULAR_TOL: f64 = 1e-3;

/// `(r', z', theta')` at a state; `r` must be positive.
pub fn profile_rhs<T: Real>(state: (T, T, T)) -> Result<(T, T, T)> {
    let (r, z, theta) = state;
    if !(r > T::zero()) {
        return Err(Error::AxisCrossing { arclength: f64::NAN });
    }
    let (s, c) = theta.sin_cos();
    Ok((c, s, (r * s - z * c) * T::lit(0.5) - s / r))
}

// state: r, z, theta and the accumulated half Gaussian area
#[derive(Clone, Copy, Debug)]
struct State<T> {
    r: T,
    z: T,
    theta: T,
    f: T,
}

fn deriv<T: Real>(x: State<T>, arclength: T) -> Result<State<T>> {
    let (dr, dz, dt) = profile_rhs((x.r, x.z, x.theta)).map_err(|_| Error::AxisCrossing {
        arclength: arclength.to_f64_lossy(),
    })?;
    let df = T::lit(0.5) * x.r * (-(x.r * x.r + x.z * x.z) / T::lit(4.0)).exp();
    Ok(State { r: dr, z: dz, theta: dt, f: df })
}

fn rk4<T: Real>(x: State<T>, h: T, s: T) -> Result<State<T>> {
    let add = |a: State<T>, k: State<T>, c: T| State {
        r: a.r + c * k.r,
        z: a.z + c * k.z,
        theta: a.theta + c * k.theta,
        f: a.f + c * k.f,
    };
    let half = h * T::lit(0.5);
    let k1 = deriv(x, s)?;
    let k2 = deriv(add(x, k1, half), s)?;
    let k3 = deriv(add(x, k2, half), s)?;
    let k4 = deriv(add(x, k3, h), s)?;
    let six = T::lit(6.0);
    Ok(State {
        r: x.r + h / six * (k1.r + T::lit(2.0) * k2.r + T::lit(2.0) * k3.r + k4.r),
        z: x.z + h / six * (k1.z + T::lit(2.0) * k2.z + T::lit(2.0) * k3.z + k4.z),
        theta: x.theta + h / six * (k1.theta + T::lit(2.0) * k2.theta + T::lit(2.0) * k3.theta + k4.theta),
        f: x.f + h / six * (k1.f + T::lit(2.0) * k2.f + T::lit(2.0) * k3.f + k4.f),
    })
}

/// How a shooting run ended.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "cause", rename_all = "snake_case")]
pub enum Termination<T: Real> {
    /// The curve came back to `z = 0`; `mismatch = cos(theta)` there, zero
    /// for a perpendicular return.
    Return { r: T, theta: T, mismatch: T },
    /// The curve reached the axis perpendicularly; `residual` is `sin(theta)`
    /// extrapolated to `r = 0`.
    Axis { z: T, residual: T },
    /// The arclength budget ran out.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ShootResult<T: Real> {
    pub r_start: T,
    /// The integrated arc, sampled at every step.
    pub arc: ProfileCurve<T>,
    pub termination: Termination<T>,
    /// `1/2 * integral of r exp(-(r^2 + z^2)/4)` along the arc, integrated
    /// with the curve.
    pub half_area: T,
}

/// Integrates from `(r_start, 0)` with tangent angle `direction` until `z`
/// returns to 0, the axis is reached, or the arclength budget is spent.
///
/// Starts within one step of the axis are refused with an axis-crossing
/// signal: the curvature there, about `1/r_start`, is beyond the fixed step.
pub fn shoot<T: Real>(r_start: T, direction: T, max_arclength: T) -> Result<ShootResult<T>> {
    if !(r_start > T::zero()) {
        return Err(Error::Argument(format!("r_start must be positive, got {r_start}")));
    }
    if r_start <= T::lit(STEP) {
        return Err(Error::AxisCrossing { arclength: 0.0 });
    }
    integrate((r_start, T::zero(), direction), max_arclength, true)
}

/// Integrates from an arbitrary state for at most `length`; with
/// `stop_at_return` the run ends at the first return to `z = 0`.
pub fn integrate<T: Real>(start: (T, T, T), length: T, stop_at_return: bool) -> Result<ShootResult<T>> {
    let step = T::lit(STEP);
    let mut x = State { r: start.0, z: start.1, theta: start.2, f: T::zero() };
    let mut s = T::zero();
    let mut pts = vec![ProfilePoint { s, r: x.r, z: x.z, theta: x.theta }];
    let z0_sign = |z: T, theta: T| if z != T::zero() { z.signum() } else { theta.sin().signum() };
    let side = z0_sign(start.1, start.2);
    let mut left_section = start.1 != T::zero();
    let termination = loop {
        let remaining = length - s;
        // roundoff in the accumulated arclength leaves slivers of a step
        if remaining <= T::lit(1e-12) {
            break Termination::Budget;
        }
        let mut h = step.min(remaining);
        if x.r < T::lit(AXIS_SLOW) {
            h = h.min(x.r / T::lit(4.0));
        }
        if h < T::lit(1e-12) {
            return Err(Error::AxisCrossing { arclength: s.to_f64_lossy() });
        }
        let next = rk4(x, h, s)?;
        if !(next.r.is_finite() && next.z.is_finite() && next.theta.is_finite()) {
            return Err(Error::AxisCrossing { arclength: s.to_f64_lossy() });
        }
        if stop_at_return && left_section && next.z * side <= T::zero() {
            let (tau_h, hit) = refine_return(x, h, s)?;
            s += tau_h;
            x = hit;
            pts.push(ProfilePoint { s, r: x.r, z: T::zero(), theta: x.theta });
            break Termination::Return { r: x.r, theta: x.theta, mismatch: x.theta.cos() };
        }
        s += h;
        x = next;
        if x.z * side > T::zero() {
            left_section = true;
        }
        pts.push(ProfilePoint { s, r: x.r, z: x.z, theta: x.theta });
        if x.r < T::lit(AXIS_STOP) {
            // d sin(theta) / dr = theta' near a perpendicular hit, and there
            // theta' tends to (r sin - z cos) / 4
            let (sn, cs) = x.theta.sin_cos();
            let slope = (x.r * sn - x.z * cs) / T::lit(4.0);
            let residual = sn - slope * x.r;
            if residual.abs() > T::lit(AXIS_PERPENDICULAR_TOL) {
                return Err(Error::AxisCrossing { arclength: s.to_f64_lossy() });
            }
            let z_axis = x.z - x.r * sn / cs;
            break Termination::Axis { z: z_axis, residual };
        }
    };
    let half_area = x.f;
    Ok(ShootResult { r_start: start.0, arc: ProfileCurve { points: pts, closed: false }, termination, half_area })
}

// Secant iteration on the step fraction that lands on z = 0.
fn refine_return<T: Real>(x: State<T>, h: T, s: T) -> Result<(T, State<T>)> {
    let z_at = |t: T| -> Result<State<T>> { rk4(x, t, s) };
    let (mut a, mut za) = (T::zero(), x.z);
    let end = z_at(h)?;
    let (mut b, mut zb) = (h, end.z);
    let mut best = end;
    for _ in 0..50 {
        if zb == za {
            break;
        }
        let c = b - zb * (b - a) / (zb - za);
        let c = c.max(T::zero()).min(h);
        let st = z_at(c)?;
        a = b;
        za = zb;
        b = c;
        zb = st.z;
        best = st;
        if zb.abs() < T::lit(1e-15) {
            break;
        }
    }
    Ok((b, best))
}

/// Signed closure mismatch `cos(theta)` at the first return to `z = 0` of the
/// curve shot vertically from `(r_start, 0)`; `None` when the curve does not
/// return.
pub fn closure_mismatch<T: Real>(r_start: T, max_arclength: T) -> Option<T> {
    match shoot(r_start, T::FRAC_PI_2(), max_arclength) {
        Ok(ShootResult { termination: Termination::Return { mismatch, .. }, .. }) => Some(mismatch),
        _ => None,
    }
}

/// Gaussian behaviour of an open profile beyond its last sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "kind", rename_all = "snake_case")]
pub enum Tail<T: Real> {
    /// The profile is complete: closed, or an arc with both ends on the axis.
    None,
    /// Both ends continue as the cylinder `r = radius` to `z = +/- infinity`.
    Cylinder { radius: T },
    /// The profile is the segment `z = 0, 0 <= r <= R` of a plane.
    Plane,
}

/// `F = (4 pi)^-1 * integral of exp(-|x|^2 / 4)` over the surface generated by
/// the profile, i.e. `1/2 * integral of r exp(-(r^2 + z^2)/4) ds`, by the
/// trapezoid rule on the samples plus the analytic tail.
pub fn gaussian_area<T: Real>(profile: &ProfileCurve<T>, tail: Tail<T>) -> Result<T> {
    let pts = profile.positions();
    if pts.len() < 2 {
        return Err(Error::Argument("profile needs at least 2 samples".into()));
    }
    let g = |p: (T, T)| p.0 * (-(p.0 * p.0 + p.1 * p.1) / T::lit(4.0)).exp();
    let mut sum = T::zero();
    let n = pts.len();
    let segs = if profile.closed { n } else { n - 1 };
    for k in 0..segs {
        let (p, q) = (pts[k], pts[(k + 1) % n]);
        let ds = (q.0 - p.0).hypot(q.1 - p.1);
        sum += (g(p) + g(q)) * ds * T::lit(0.5);
    }
    let body = sum * T::lit(0.5);
    let (first, last) = (pts[0], pts[n - 1]);
    let axis_tol = T::lit(1e-6);
    let tail_value = match tail {
        Tail::None => {
            if !profile.closed && (first.0 > axis_tol || last.0 > axis_tol) {
                return Err(Error::Argument("open profile must end on the axis or carry a tail model".into()));
            }
            T::zero()
        }
        Tail::Cylinder { radius } => {
            // 1/2 * R exp(-R^2/4) * integral_{|z| > Z} exp(-z^2/4) dz
            let pref = T::lit(0.5) * radius * (-(radius * radius) / T::lit(4.0)).exp() * T::PI().sqrt();
            let zs = [first.1, last.1];
            let (lo, hi) = (zs[0].min(zs[1]), zs[0].max(zs[1]));
            let erfc = |x: T| T::lit(libm::erfc(x.to_f64_lossy()));
            pref * (erfc(hi / T::lit(2.0)) + erfc(-lo / T::lit(2.0)))
        }
        Tail::Plane => {
            let r_end = first.0.max(last.0);
            (-(r_end * r_end) / T::lit(4.0)).exp()
        }
    };
    Ok(body + tail_value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ShrinkerEntry<T: Real> {
    pub name: String,
    pub r_start: T,
    pub profile: ProfileCurve<T>,
    pub gaussian_area: T,
    pub closure_residual: T,
}

/// Finds every `r_start` in `[r_lo, r_hi]` whose vertical shot returns to
/// `z = 0` perpendicularly, scanning `scan_points` samples and bisecting each
/// sign change of the mismatch until it is below `tol`.
pub fn find_torus_shrinkers<T: Real>(r_lo: T, r_hi: T, tol: T, scan_points: usize) -> Result<Vec<ShrinkerEntry<T>>> {
    if !(r_lo > T::zero() && r_hi > r_lo) || scan_points < 2 {
        return Err(Error::Argument(format!("bad bracket [{r_lo}, {r_hi}]")));
    }
    let budget = T::lit(40.0);
    let n = scan_points - 1;
    let scan: Vec<(T, Option<T>)> = (0..=n)
        .map(|k| {
            let r = r_lo + (r_hi - r_lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n);
            (r, closure_mismatch(r, budget))
        })
        .collect();
    let mut entries = Vec::new();
    for w in scan.windows(2) {
        let ((mut a, Some(mut fa)), (mut b, Some(fb))) = (w[0], w[1]) else { continue };
        if fa == T::zero() {
            b = a;
        } else if fa.signum() == fb.signum() {
            continue;
        }
        while b - a > T::lit(1e-15) * b {
            let m = (a + b) * T::lit(0.5);
            let Some(fm) = closure_mismatch(m, budget) else { break };
            if fm.abs() < tol {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        let r = (a + b) * T::lit(0.5);
        if let Ok(entry) = torus_entry(r, budget) {
            // sign changes across a jump of the first return are not roots
            if entry.closure_residual < tol {
                entries.push(entry);
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::Bracket {
            lo: r_lo.to_f64_lossy(),
            hi: r_hi.to_f64_lossy(),
            scan: scan.iter().map(|(r, m)| (r.to_f64_lossy(), m.map(|m| m.to_f64_lossy()))).collect(),
        });
    }
    Ok(entries)
}

/// The embedded closed torus-type profile in the bracket.
pub fn find_torus_shrinker<T: Real>(r_lo: T, r_hi: T, tol: T) -> Result<ShrinkerEntry<T>> {
    let all = find_torus_shrinkers(r_lo, r_hi, tol, 27)?;
    let lo = r_lo.to_f64_lossy();
    let hi = r_hi.to_f64_lossy();
    all.into_iter()
        .find(|e| e.profile.is_simple() && e.profile.points.iter().all(|p| p.r > T::zero()))
        .ok_or(Error::Bracket { lo, hi, scan: Vec::new() })
}

fn torus_entry<T: Real>(r_start: T, budget: T) -> Result<ShrinkerEntry<T>> {
    let shot = shoot(r_start, T::FRAC_PI_2(), budget)?;
    let Termination::Return { mismatch, .. } = shot.termination else {
        return Err(Error::Consistency("torus candidate did not return to z = 0".into()));
    };
    let profile = mirror_closed(&shot.arc);
    let gaussian_area = gaussian_area(&profile, Tail::None)?;
    Ok(ShrinkerEntry { name: "torus".into(), r_start, profile, gaussian_area, closure_residual: mismatch.abs() })
}

// Closes an arc from z = 0 back to z = 0 by its mirror image in z = 0, and
// orients the loop counterclockwise.
fn mirror_closed<T: Real>(arc: &ProfileCurve<T>) -> ProfileCurve<T> {
    let half = &arc.points;
    let mut pos: Vec<(T, T)> = half.iter().map(|p| (p.r, p.z)).collect();
    pos.extend(half[1..half.len() - 1].iter().rev().map(|p| (p.r, -p.z)));
    let mut curve = ProfileCurve::from_positions(&pos, true);
    if curve.signed_area() < T::zero() {
        pos.reverse();
        curve = ProfileCurve::from_positions(&pos, true);
    }
    curve
}

// Completes an arc from z = 0 to the axis into the full axis-to-axis arc.
fn mirror_sphere<T: Real>(arc: &ProfileCurve<T>, z_axis: T) -> ProfileCurve<T> {
    let half = &arc.points;
    let mut pos: Vec<(T, T)> = vec![(T::zero(), -z_axis)];
    pos.extend(half.iter().rev().skip(1).map(|p| (p.r, -p.z)));
    pos.extend(half.iter().map(|p| (p.r, p.z)));
    pos.push((T::zero(), z_axis));
    ProfileCurve::from_positions(&pos, false)
}

/// The catalogue: plane, sphere, cylinder and the torus found in
/// `[0.1, 1.4]`.
pub fn catalogue<T: Real>(torus_tol: T) -> Result<Vec<ShrinkerEntry<T>>> {
    let mut out = Vec::new();

    let n = 4000;
    let r_end = T::lit(20.0);
    let plane: Vec<(T, T)> = (0..=n).map(|k| (r_end * T::from_usize_lossy(k) / T::from_usize_lossy(n), T::zero())).collect();
    let plane = ProfileCurve::from_positions(&plane, false);
    let f = gaussian_area(&plane, Tail::Plane)?;
    out.push(ShrinkerEntry { name: "plane".into(), r_start: T::zero(), profile: plane, gaussian_area: f, closure_residual: T::zero() });

    let two = T::lit(2.0);
    let shot = shoot(two, T::FRAC_PI_2(), T::lit(10.0))?;
    let Termination::Axis { z, residual } = shot.termination else {
        return Err(Error::Consistency("sphere shot did not reach the axis".into()));
    };
    let sphere = mirror_sphere(&shot.arc, z);
    let f = gaussian_area(&sphere, Tail::None)?;
    out.push(ShrinkerEntry { name: "sphere".into(), r_start: two, profile: sphere, gaussian_area: f, closure_residual: residual.abs() });

    let root2 = two.sqrt();
    let length = T::lit(5.0);
    let shot = shoot(root2, T::FRAC_PI_2(), length)?;
    let drift = shot
        .arc
        .points
        .iter()
        .map(|p| (p.r - root2).abs().max((p.theta - T::FRAC_PI_2()).abs()))
        .fold(T::zero(), T::max);
    let mut pos: Vec<(T, T)> = shot.arc.points.iter().rev().map(|p| (p.r, -p.z)).collect();
    pos.extend(shot.arc.points.iter().skip(1).map(|p| (p.r, p.z)));
    let cyl = ProfileCurve::from_positions(&pos, false);
    let f = gaussian_area(&cyl, Tail::Cylinder { radius: root2 })?;
    out.push(ShrinkerEntry { name: "cylinder".into(), r_start: root2, profile: cyl, gaussian_area: f, closure_residual: drift });

    out.push(find_torus_shrinker(T::lit(0.1), T::lit(1.4), torus_tol)?);
    Ok(out)
}

/// Writes `name,r_start,closure_residual,F`.
pub fn write_catalogue_csv<T: Real, W: Write>(entries: &[ShrinkerEntry<T>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "name,r_start,closure_residual,F")?;
    for e in entries {
        writeln!(out, "{},{},{:e},{}", e.name, e.r_start, e.closure_residual.to_f64_lossy(), e.gaussian_area)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_direction_is_stationary() {
        let r = 2f64.sqrt();
        let (_, _, dt) = profile_rhs((r, 0.7, std::f64::consts::FRAC_PI_2)).unwrap();
        assert!(dt.abs() < 1e-15);
    }

    #[test]
    fn sphere_curvature_is_one_half() {
        for a in [0.0f64, 0.4, 1.1, 1.5] {
            let (r, z) = (2.0 * a.cos(), 2.0 * a.sin());
            let (_, _, dt) = profile_rhs((r, z, a + std::f64::consts::FRAC_PI_2)).unwrap();
            assert!((dt - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn axis_is_rejected() {
        assert!(matches!(profile_rhs((0.0f64, 0.0, 1.0)), Err(Error::AxisCrossing { .. })));
    }

    #[test]
    fn cylinder_shot_stays_on_line() {
        let r = 2f64.sqrt();
        let shot = shoot(r, std::f64::consts::FRAC_PI_2, 5.0).unwrap();
        assert_eq!(shot.termination, Termination::Budget);
        for p in &shot.arc.points {
            assert!((p.r - r).abs() < 1e-6);
        }
        assert!((shot.arc.points.last().unwrap().s - 5.0).abs() < 1e-12);
    }

    #[test]
    fn budget_with_roundoff_ends_cleanly() {
        for len in [3.0f64, 0.3, 2.7] {
            let shot = integrate((1.0, 0.2, 0.4), len, false).unwrap();
            assert_eq!(shot.termination, Termination::Budget);
        }
    }

    #[test]
    fn sphere_shot_reaches_axis_on_the_circle() {
        let shot = shoot(2.0f64, std::f64::consts::FRAC_PI_2, 10.0).unwrap();
        let Termination::Axis { z, residual } = shot.termination else { panic!("{:?}", shot.termination) };
        assert!((z - 2.0).abs() < 1e-5);
        assert!(residual.abs() < 1e-5);
        for p in &shot.arc.points {
            assert!((p.r.hypot(p.z) - 2.0).abs() < 1e-5);
        }
    }

    #[test]
    fn start_near_axis_signals_crossing() {
        assert!(matches!(shoot(1e-3f64, std::f64::consts::FRAC_PI_2, 10.0), Err(Error::AxisCrossing { .. })));
    }

    #[test]
    fn plane_area_is_one() {
        let pts: Vec<(f64, f64)> = (0..=2000).map(|k| (k as f64 * 0.01, 0.0)).collect();
        let f = gaussian_area(&ProfileCurve::from_positions(&pts, false), Tail::Plane).unwrap();
        assert!((f - 1.0).abs() < 1e-5);
        assert!(gaussian_area(&ProfileCurve::from_positions(&pts, false), Tail::None).is_err());
    }

    #[test]
    fn catalogue_csv_header() {
        let mut buf = Vec::new();
        write_catalogue_csv::<f64, _>(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,r_start,closure_residual,F\n");
    }
}
