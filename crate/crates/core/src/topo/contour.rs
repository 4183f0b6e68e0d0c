use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::profile::segments;
use crate::real::Real;

/// A polyline of the zero contour. `neg_nodes[v]` is the grid node on the
/// negative side of the edge that carries vertex `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Polyline<T: Real> {
    pub points: Vec<(T, T)>,
    #[serde(skip)]
    pub neg_nodes: Vec<usize>,
}

impl<T: Real> Polyline<T> {
    /// Shoelace area; open curves are closed along the axis.
    pub fn signed_area(&self) -> T {
        let s = segments(&self.points, true).fold(T::zero(), |acc, (p, q)| acc + (p.0 * q.1 - q.0 * p.1));
        s * T::lit(0.5)
    }

    pub fn length(&self, closed: bool) -> T {
        segments(&self.points, closed).fold(T::zero(), |acc, (p, q)| acc + (p.0 - q.0).hypot(p.1 - q.1))
    }

    pub fn centroid(&self) -> (T, T) {
        let n = T::from_usize_lossy(self.points.len().max(1));
        let (sr, sz) = self.points.iter().fold((T::zero(), T::zero()), |a, p| (a.0 + p.0, a.1 + p.1));
        (sr / n, sz / n)
    }
}

/// The zero set of the level set function in the half-plane.
///
/// Loops are closed (the last point connects to the first) and carry the
/// inside region on their left. Arcs run from one axis point to another,
/// also with the inside on their left.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Contour<T: Real> {
    pub loops: Vec<Polyline<T>>,
    pub arcs: Vec<Polyline<T>>,
    /// Open curves that end on the outer boundary of the grid (the surface
    /// left the computational box). Empty for valid runs.
    pub clipped: Vec<Polyline<T>>,
}

impl<T: Real> Contour<T> {
    pub fn is_empty(&self) -> bool {
        self.loops.is_empty() && self.arcs.is_empty() && self.clipped.is_empty()
    }

    pub fn curves(&self) -> impl Iterator<Item = &Polyline<T>> {
        self.loops.iter().chain(&self.arcs).chain(&self.clipped)
    }

    /// All vertices of all curves.
    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.curves().flat_map(|c| c.points.iter().copied())
    }

    /// Segments of all curves (loops closed, arcs open).
    pub fn segments(&self) -> Vec<((T, T), (T, T))> {
        let mut out = Vec::new();
        for c in &self.loops {
            out.extend(segments(&c.points, true));
        }
        for c in self.arcs.iter().chain(&self.clipped) {
            out.extend(segments(&c.points, false));
        }
        out
    }
}

// Edge identifiers: horizontal edge (i,j)-(i+1,j) is 2k, vertical edge
// (i,j)-(i,j+1) is 2k+1, with k the index of node (i,j).
#[derive(Clone, Copy)]
struct Crossing<T> {
    point: (T, T),
    neg_node: usize,
}

/// Marching squares with linear interpolation along edges. Saddle cells are
/// resolved by the sign of the cell-centre average: a negative average joins
/// the two negative corners.
pub fn extract_contour<T: Real>(field: &ScalarField<T>) -> Contour<T> {
    let g = field.grid;
    let w = g.width();
    let u = &field.values;
    let neg = |k: usize| u[k] < T::zero();

    let mut crossings: HashMap<usize, Crossing<T>> = HashMap::new();
    let mut crossing = |a: usize, b: usize, id: usize| -> usize {
        crossings.entry(id).or_insert_with(|| {
            let (ua, ub) = (u[a], u[b]);
            let t = ua / (ua - ub);
            let (pa, pb) = (g.node(a), g.node(b));
            Crossing {
                point: (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1)),
                neg_node: if ua < T::zero() { a } else { b },
            }
        });
        id
    };

    // oriented segments: start edge -> end edge
    let mut next: HashMap<usize, usize> = HashMap::new();
    let mut has_pred: HashMap<usize, bool> = HashMap::new();
    for j in 0..g.nz {
        for i in 0..g.nr {
            let c = [g.idx(i, j), g.idx(i + 1, j), g.idx(i + 1, j + 1), g.idx(i, j + 1)];
            let s = [neg(c[0]), neg(c[1]), neg(c[2]), neg(c[3])];
            if s.iter().all(|&x| x) || s.iter().all(|&x| !x) {
                continue;
            }
            // counterclockwise edges: bottom, right, top, left
            let ids = [2 * c[0], 2 * c[1] + 1, 2 * c[3], 2 * c[0] + 1];
            let mut starts = [false; 4];
            let mut ends = [false; 4];
            for e in 0..4 {
                let (a, b) = (s[e], s[(e + 1) % 4]);
                starts[e] = a && !b;
                ends[e] = !a && b;
            }
            let saddle = s[0] == s[2] && s[1] == s[3];
            let joined = {
                let avg = u[c[0]] + u[c[1]] + u[c[2]] + u[c[3]];
                avg < T::zero()
            };
            for e in 0..4 {
                if !starts[e] {
                    continue;
                }
                let end = if saddle && !joined {
                    (e + 3) % 4
                } else {
                    (1..4).map(|d| (e + d) % 4).find(|&f| ends[f]).expect("non-trivial cell has an exit edge")
                };
                let (ea, eb) = edge_nodes(&c, e);
                let (fa, fb) = edge_nodes(&c, end);
                let from = crossing(ea, eb, ids[e]);
                let to = crossing(fa, fb, ids[end]);
                next.insert(from, to);
                has_pred.insert(to, true);
            }
        }
    }

    let mut contour = Contour { loops: Vec::new(), arcs: Vec::new(), clipped: Vec::new() };
    let mut visited: HashMap<usize, bool> = HashMap::new();
    let to_polyline = |ids: &[usize]| Polyline {
        points: ids.iter().map(|id| crossings[id].point).collect(),
        neg_nodes: ids.iter().map(|id| crossings[id].neg_node).collect(),
    };
    let on_axis = |id: usize| id % 2 == 1 && (id / 2) % w == 0;

    // open curves first: they start at a crossing without predecessor
    let mut open_starts: Vec<usize> = next.keys().copied().filter(|k| !has_pred.contains_key(k)).collect();
    open_starts.sort_unstable();
    for start in open_starts {
        let mut ids = vec![start];
        visited.insert(start, true);
        let mut cur = start;
        while let Some(&n) = next.get(&cur) {
            ids.push(n);
            visited.insert(n, true);
            cur = n;
        }
        let poly = to_polyline(&ids);
        if on_axis(start) && on_axis(*ids.last().unwrap()) {
            contour.arcs.push(poly);
        } else {
            contour.clipped.push(poly);
        }
    }
    let mut loop_starts: Vec<usize> = next.keys().copied().collect();
    loop_starts.sort_unstable();
    for start in loop_starts {
        if visited.contains_key(&start) {
            continue;
        }
        let mut ids = Vec::new();
        let mut cur = start;
        loop {
            ids.push(cur);
            visited.insert(cur, true);
            cur = next[&cur];
            if cur == start {
                break;
            }
        }
        contour.loops.push(to_polyline(&ids));
    }
    contour
}

fn edge_nodes(c: &[usize; 4], e: usize) -> (usize, usize) {
    (c[e], c[(e + 1) % 4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_grid, init_signed_distance, SurfaceSpec};

    #[test]
    fn torus_gives_one_ccw_loop() {
        let g = build_grid(4.0f64, -2.0, 2.0, 1.0 / 32.0).unwrap();
        let u = init_signed_distance(&SurfaceSpec::Torus { core_radius: 2.0, tube_radius: 0.5, center_z: 0.0 }, &g).unwrap();
        let c = extract_contour(&u);
        assert_eq!(c.loops.len(), 1);
        assert!(c.arcs.is_empty() && c.clipped.is_empty());
        let l = &c.loops[0];
        let (cr, cz) = l.centroid();
        assert!((cr - 2.0).abs() < 1e-2 && cz.abs() < 1e-2);
        assert!(l.signed_area() > 0.0);
        assert!((l.signed_area() - std::f64::consts::PI * 0.25).abs() < 1e-2);
        for p in &l.points {
            assert!(((p.0 - 2.0).hypot(p.1) - 0.5).abs() < g.h / 2.0);
        }
    }

    #[test]
    fn sphere_gives_axis_arc() {
        let g = build_grid(2.0f64, -2.0, 2.0, 1.0 / 32.0).unwrap();
        let u = init_signed_distance(&SurfaceSpec::Sphere { center_z: 0.0, radius: 1.0 }, &g).unwrap();
        let c = extract_contour(&u);
        assert_eq!(c.arcs.len(), 1);
        assert!(c.loops.is_empty());
        let a = &c.arcs[0];
        let (first, last) = (a.points[0], *a.points.last().unwrap());
        assert_eq!(first.0, 0.0);
        assert_eq!(last.0, 0.0);
        let mut ends = [first.1, last.1];
        ends.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((ends[0] + 1.0).abs() < 1e-3 && (ends[1] - 1.0).abs() < 1e-3);
        assert!(a.signed_area() > 0.0);
    }

    #[test]
    fn empty_field_has_no_curves() {
        let g = build_grid(1.0f64, -1.0, 1.0, 0.125).unwrap();
        assert!(extract_contour(&ScalarField::constant(g, 1.0)).is_empty());
    }
}
