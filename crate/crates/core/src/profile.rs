//! Generating curves of surfaces of revolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ProfilePoint<T: Real> {
    /// Arclength from the first sample.
    pub s: T,
    pub r: T,
    pub z: T,
    /// Tangent angle: `(r', z') = (cos theta, sin theta)`.
    pub theta: T,
}

/// A curve in the half-plane `r >= 0`. Closed curves generate tori; open
/// curves must start and end on the axis and generate spheres.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ProfileCurve<T: Real> {
    pub points: Vec<ProfilePoint<T>>,
    pub closed: bool,
}

impl<T: Real> ProfileCurve<T> {
    /// Builds a curve from positions, filling arclength and tangent angles.
    /// For closed curves the last point must not repeat the first.
    pub fn from_positions(pts: &[(T, T)], closed: bool) -> Self {
        let n = pts.len();
        let mut points = Vec::with_capacity(n);
        let mut s = T::zero();
        for k in 0..n {
            if k > 0 {
                s += dist(pts[k - 1], pts[k]);
            }
            let (prev, next) = if closed {
                (pts[(k + n - 1) % n], pts[(k + 1) % n])
            } else {
                (pts[k.saturating_sub(1)], pts[(k + 1).min(n - 1)])
            };
            let theta = (next.1 - prev.1).atan2(next.0 - prev.0);
            points.push(ProfilePoint { s, r: pts[k].0, z: pts[k].1, theta });
        }
        Self { points, closed }
    }

    pub fn positions(&self) -> Vec<(T, T)> {
        self.points.iter().map(|p| (p.r, p.z)).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total length, including the closing segment of a closed curve.
    pub fn length(&self) -> T {
        let pos = self.positions();
        segments(&pos, self.closed).map(|(a, b)| dist(a, b)).fold(T::zero(), |x, y| x + y)
    }

    /// Shoelace area; positive when the enclosed region is on the left.
    /// Open curves are closed along the axis.
    pub fn signed_area(&self) -> T {
        let pos = self.positions();
        let half = T::lit(0.5);
        let mut a = segments(&pos, true).fold(T::zero(), |acc, (p, q)| acc + (p.0 * q.1 - q.0 * p.1));
        a = a * half;
        a
    }

    pub fn bounding_box(&self) -> (T, T, T, T) {
        let mut b = (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
        for p in &self.points {
            b.0 = b.0.min(p.r);
            b.1 = b.1.max(p.r);
            b.2 = b.2.min(p.z);
            b.3 = b.3.max(p.z);
        }
        b
    }

    pub fn scaled(&self, lambda: T) -> Self {
        let pos: Vec<_> = self.positions().into_iter().map(|(r, z)| (r * lambda, z * lambda)).collect();
        Self::from_positions(&pos, self.closed)
    }

    pub fn translated_z(&self, dz: T) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            p.z += dz;
        }
        out
    }

    /// Resamples at (approximately) uniform arclength spacing.
    pub fn resampled(&self, spacing: T) -> Self {
        let pos = self.positions();
        let total = self.length();
        let n = (total / spacing).ceil().to_usize().unwrap_or(1).max(if self.closed { 8 } else { 2 });
        let step = total / T::from_usize_lossy(if self.closed { n } else { n - 1 });
        let segs: Vec<_> = segments(&pos, self.closed).collect();
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        let mut seg_start = T::zero();
        for k in 0..n {
            let target = step * T::from_usize_lossy(k);
            while seg + 1 < segs.len() && seg_start + dist(segs[seg].0, segs[seg].1) < target {
                seg_start += dist(segs[seg].0, segs[seg].1);
                seg += 1;
            }
            let (a, b) = segs[seg];
            let l = dist(a, b);
            let t = if l > T::zero() { ((target - seg_start) / l).min(T::one()).max(T::zero()) } else { T::zero() };
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
        Self::from_positions(&out, self.closed)
    }

    /// True when no two non-adjacent segments intersect.
    pub fn is_simple(&self) -> bool {
        let pos = self.positions();
        let segs: Vec<_> = segments(&pos, self.closed).collect();
        let m = segs.len();
        for a in 0..m {
            for b in (a + 2)..m {
                if self.closed && a == 0 && b == m - 1 {
                    continue;
                }
                if segments_intersect(segs[a], segs[b]) {
                    return false;
                }
            }
        }
        true
    }

    /// Unit normal at each sample pointing away from the enclosed region.
    pub fn outward_normals(&self) -> Vec<(T, T)> {
        let ccw = self.signed_area() > T::zero();
        self.points
            .iter()
            .map(|p| {
                let (s, c) = p.theta.sin_cos();
                if ccw { (s, -c) } else { (-s, c) }
            })
            .collect()
    }

    /// Checks that the curve is usable as a surface generator.
    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 3 {
            return Err(Error::Config("profile needs at least 3 samples".into()));
        }
        if self.points.iter().any(|p| !p.r.is_finite() || !p.z.is_finite()) {
            return Err(Error::Config("profile has non-finite samples".into()));
        }
        if self.closed {
            if self.points.iter().any(|p| p.r <= T::zero()) {
                return Err(Error::Config("closed profile must stay off the axis".into()));
            }
        } else if self.points.iter().any(|p| p.r < T::zero()) {
            return Err(Error::Config("profile leaves the half-plane".into()));
        }
        Ok(())
    }
}

/// Reads curves from CSV with columns `r,z` and an optional integer
/// `curve` column grouping rows into curves. A curve whose last row repeats
/// its first is closed; the repeated row is dropped.
pub fn read_profiles_csv<T: Real, R: std::io::Read>(input: R) -> Result<Vec<ProfileCurve<T>>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rd.headers().map_err(|e| Error::Config(format!("profile csv: {e}")))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ri), Some(zi)) = (col("r"), col("z")) else {
        return Err(Error::Config("profile csv needs `r` and `z` columns".into()));
    };
    let ci = col("curve");
    let mut groups: Vec<(String, Vec<(T, T)>)> = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| Error::Config(format!("profile csv: {e}")))?;
        let num = |i: usize| -> Result<T> {
            let v: f64 = rec.get(i).unwrap_or("").parse().map_err(|_| Error::Config(format!("profile csv row {}: bad number", line + 2)))?;
            Ok(T::lit(v))
        };
        let id = ci.and_then(|i| rec.get(i)).unwrap_or("").to_string();
        let p = (num(ri)?, num(zi)?);
        match groups.last_mut() {
            Some((g, pts)) if *g == id => pts.push(p),
            _ => groups.push((id, vec![p])),
        }
    }
    let curves: Vec<ProfileCurve<T>> = groups
        .into_iter()
        .map(|(_, mut pts)| {
            let closed = pts.len() > 3 && pts.first() == pts.last();
            if closed {
                pts.pop();
            }
            ProfileCurve::from_positions(&pts, closed)
        })
        .collect();
    if curves.is_empty() {
        return Err(Error::Config("profile csv has no rows".into()));
    }
    for c in &curves {
        c.validate()?;
    }
    Ok(curves)
}

/// Inverse of [`read_profiles_csv`].
pub fn write_profiles_csv<T: Real, W: std::io::Write>(curves: &[ProfileCurve<T>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "curve,r,z")?;
    for (k, c) in curves.iter().enumerate() {
        for p in &c.points {
            writeln!(out, "{k},{},{}", p.r, p.z)?;
        }
        if let (true, Some(p)) = (c.closed, c.points.first()) {
            writeln!(out, "{k},{},{}", p.r, p.z)?;
        }
    }
    Ok(())
}

pub(crate) fn dist<T: Real>(a: (T, T), b: (T, T)) -> T {
    (a.0 - b.0).hypot(a.1 - b.1)
}

pub(crate) fn segments<T: Real>(pos: &[(T, T)], closed: bool) -> impl Iterator<Item = ((T, T), (T, T))> + '_ {
    let n = pos.len();
    let m = if closed { n } else { n.saturating_sub(1) };
    (0..m).map(move |k| (pos[k], pos[(k + 1) % n]))
}

/// Distance from `p` to segment `ab`.
pub(crate) fn point_segment_distance<T: Real>(p: (T, T), a: (T, T), b: (T, T)) -> T {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > T::zero() {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    dist(p, (a.0 + t * dx, a.1 + t * dy))
}

fn orient<T: Real>(a: (T, T), b: (T, T), c: (T, T)) -> T {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_intersect<T: Real>(s: ((T, T), (T, T)), t: ((T, T), (T, T))) -> bool {
    let d1 = orient(t.0, t.1, s.0);
    let d2 = orient(t.0, t.1, s.1);
    let d3 = orient(s.0, s.1, t.0);
    let d4 = orient(s.0, s.1, t.1);
    let z = T::zero();
    ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z))
}

/// Even-odd point-in-polygon test.
pub(crate) fn inside_polygon<T: Real>(p: (T, T), poly: &[(T, T)]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.1 > p.1) != (b.1 > p.1) {
            let x = a.0 + (p.1 - a.1) / (b.1 - a.1) * (b.0 - a.0);
            if p.0 < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_closedness() {
        let ring = circle(40, (2.0, 0.0), 0.5);
        let cap: Vec<(f64, f64)> = (0..=20).map(|k| (std::f64::consts::PI * k as f64 / 20.0).sin_cos()).collect();
        let cap = ProfileCurve::from_positions(&cap, false);
        let mut buf = Vec::new();
        write_profiles_csv(&[ring.clone(), cap.clone()], &mut buf).unwrap();
        let back: Vec<ProfileCurve<f64>> = read_profiles_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back[0].closed && !back[1].closed);
        assert_eq!(back[0].len(), 40);
        assert!((back[0].length() - ring.length()).abs() < 1e-12);
        assert!((back[1].signed_area() - cap.signed_area()).abs() < 1e-12);
        assert!(read_profiles_csv::<f64, _>("x,y\n1,2\n".as_bytes()).is_err());
    }

    fn circle(n: usize, c: (f64, f64), rad: f64) -> ProfileCurve<f64> {
        let pts: Vec<_> = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                (c.0 + rad * a.cos(), c.1 + rad * a.sin())
            })
            .collect();
        ProfileCurve::from_positions(&pts, true)
    }

    #[test]
    fn circle_geometry() {
        let c = circle(2000, (2.0, 0.0), 0.5);
        assert!((c.length() - std::f64::consts::PI).abs() < 1e-5);
        assert!((c.signed_area() - std::f64::consts::PI * 0.25).abs() < 1e-5);
        assert!(c.is_simple());
        let n = c.outward_normals();
        assert!((n[0].0 - 1.0).abs() < 1e-9 && n[0].1.abs() < 1e-6);
    }

    #[test]
    fn resample_keeps_length() {
        let c = circle(300, (2.0, 0.0), 0.5).resampled(0.01);
        assert!((c.length() - std::f64::consts::PI).abs() < 1e-3);
        let d = dist((c.points[1].r, c.points[1].z), (c.points[0].r, c.points[0].z));
        assert!((d - 0.01).abs() < 1e-3);
    }

    #[test]
    fn figure_eight_is_not_simple() {
        let pts = vec![(1.0, 0.0), (2.0, 1.0), (2.0, 0.0), (1.0, 1.0)];
        assert!(!ProfileCurve::from_positions(&pts, true).is_simple());
    }
}
