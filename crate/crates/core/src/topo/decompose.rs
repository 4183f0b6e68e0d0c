use serde::{Deserialize, Serialize};

use super::components::{label_components, UNLABELED};
use super::contour::Contour;
use crate::error::{Error, Result};
use crate::field::{AxiGrid, ScalarField};
use crate::real::Real;

/// One connected cross-section of the inside region `K_in`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct InComponent<T: Real> {
    pub touches_axis: bool,
    /// Cross-section area, from the shoelace areas of the bounding curves.
    pub area: T,
    pub nodes: usize,
    /// Deepest node (most negative `u`), tie-broken towards the centroid of
    /// the deepest nodes.
    pub innermost: (T, T),
    /// Half-width of the narrowest part. Off the axis this is the radius of
    /// the disc of equal area (the tube radius of a solid torus); on the axis
    /// it is the smallest interior local minimum of the radial extent over
    /// `z` (the waist of a dumbbell), or the largest radial extent when the
    /// profile has no waist.
    pub neck_width: T,
}

/// Cross-sections of `K_in` and the connectivity of `K_out` in one frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RegionDecomposition<T: Real> {
    pub in_components: Vec<InComponent<T>>,
    pub out_components: usize,
    /// A loop in `K_out` links some solid torus: some in-component is
    /// disjoint from the axis.
    pub hole_open: bool,
    #[serde(skip)]
    pub(crate) labels: Vec<u32>,
    #[serde(skip)]
    pub(crate) grid: Option<AxiGrid<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    SphereLike,
    TorusLike,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub components: Vec<SurfaceKind>,
    pub genus: usize,
}

impl<T: Real> RegionDecomposition<T> {
    /// A decomposition without grid labels; lookups fall back to distances.
    pub fn from_components(in_components: Vec<InComponent<T>>, out_components: usize) -> Self {
        let hole_open = in_components.iter().any(|c| !c.touches_axis);
        Self { in_components, out_components, hole_open, labels: Vec::new(), grid: None }
    }

    pub fn off_axis(&self) -> impl Iterator<Item = (usize, &InComponent<T>)> {
        self.in_components.iter().enumerate().filter(|(_, c)| !c.touches_axis)
    }

    /// Index of the in-component containing the grid node nearest to `p`.
    pub fn component_at(&self, p: (T, T)) -> Option<usize> {
        let g = self.grid.as_ref()?;
        let i = (p.0 / g.h).round().to_usize()?;
        let j = ((p.1 - g.z_min) / g.h).round().to_usize()?;
        if i > g.nr || j > g.nz {
            return None;
        }
        let id = *self.labels.get(g.idx(i, j))?;
        (id != UNLABELED).then_some(id as usize)
    }
}

/// Splits the half-plane into cross-sections of `K_in` / `K_out` and
/// classifies the surface components.
pub fn decompose<T: Real>(contour: &Contour<T>, field: &ScalarField<T>) -> Result<(RegionDecomposition<T>, TopologySummary)> {
    let g = field.grid;
    let lab = label_components(field, true);
    let ncomp = lab.sizes.len();
    let mut area = vec![T::zero(); ncomp];
    let mut has_curve = vec![false; ncomp];

    for curve in contour.curves() {
        let first = *curve
            .neg_nodes
            .first()
            .ok_or_else(|| Error::Consistency("contour curve without vertices".into()))?;
        let id = lab.labels[first];
        if id == UNLABELED {
            return Err(Error::Consistency("contour vertex not adjacent to an inside node".into()));
        }
        if curve.neg_nodes.iter().any(|&k| lab.labels[k] != id) {
            return Err(Error::Consistency("contour curve borders two inside components".into()));
        }
        area[id as usize] += curve.signed_area();
        has_curve[id as usize] = true;
    }

    let mut touches = vec![false; ncomp];
    let mut deepest = vec![(T::infinity(), Vec::new()); ncomp];
    for (k, &id) in lab.labels.iter().enumerate() {
        if id == UNLABELED {
            continue;
        }
        let id = id as usize;
        let (i, _) = g.ij(k);
        if i == 0 {
            touches[id] = true;
        }
        let u = field.values[k];
        let slot = &mut deepest[id];
        if u < slot.0 {
            *slot = (u, vec![k]);
        } else if u == slot.0 {
            slot.1.push(k);
        }
    }

    let h2 = g.h * g.h;
    let mut in_components = Vec::with_capacity(ncomp);
    for id in 0..ncomp {
        if !has_curve[id] {
            return Err(Error::Consistency(format!("inside component {id} has no boundary curve")));
        }
        let a = if area[id] > T::zero() { area[id] } else { T::from_usize_lossy(lab.sizes[id]) * h2 };
        let innermost = innermost_point(field, &deepest[id].1);
        let neck_width = if touches[id] {
            axis_waist(field, &lab.labels, id as u32)
        } else {
            (a / T::PI()).sqrt()
        };
        in_components.push(InComponent {
            touches_axis: touches[id],
            area: a,
            nodes: lab.sizes[id],
            innermost,
            neck_width,
        });
    }

    let out = label_components(field, false);
    let hole_open = in_components.iter().any(|c| !c.touches_axis);
    let genus = contour.loops.len();
    let mut components = vec![SurfaceKind::TorusLike; genus];
    components.extend(std::iter::repeat(SurfaceKind::SphereLike).take(contour.arcs.len()));
    Ok((
        RegionDecomposition {
            in_components,
            out_components: out.sizes.len(),
            hole_open,
            labels: lab.labels,
            grid: Some(g),
        },
        TopologySummary { components, genus },
    ))
}

fn innermost_point<T: Real>(field: &ScalarField<T>, nodes: &[usize]) -> (T, T) {
    let g = field.grid;
    let n = T::from_usize_lossy(nodes.len().max(1));
    let (sr, sz) = nodes.iter().fold((T::zero(), T::zero()), |acc, &k| {
        let p = g.node(k);
        (acc.0 + p.0, acc.1 + p.1)
    });
    let c = (sr / n, sz / n);
    nodes
        .iter()
        .map(|&k| g.node(k))
        .min_by(|a, b| {
            let da = (a.0 - c.0).hypot(a.1 - c.1);
            let db = (b.0 - c.0).hypot(b.1 - c.1);
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(c)
}

// Radial extent of the component along each row that meets the axis inside
// it, interpolated to the first sign change.
fn axis_waist<T: Real>(field: &ScalarField<T>, labels: &[u32], id: u32) -> T {
    let g = field.grid;
    let mut extents = Vec::new();
    for j in 0..g.height() {
        if labels[g.idx(0, j)] != id {
            if !extents.is_empty() {
                extents.push(None);
            }
            continue;
        }
        let mut r = g.r(g.nr);
        for i in 0..g.nr {
            let (a, b) = (field.at(i, j), field.at(i + 1, j));
            if a < T::zero() && b >= T::zero() {
                r = g.r(i) + g.h * a / (a - b);
                break;
            }
        }
        extents.push(Some(r));
    }
    let ext: Vec<T> = extents.into_iter().flatten().collect();
    let mut waist: Option<T> = None;
    for k in 1..ext.len().saturating_sub(1) {
        if ext[k] <= ext[k - 1] && ext[k] <= ext[k + 1] && (ext[k] < ext[k - 1] || ext[k] < ext[k + 1]) {
            // ignore shallow wiggles at the caps
            let left = ext[..k].iter().copied().fold(T::zero(), T::max);
            let right = ext[k + 1..].iter().copied().fold(T::zero(), T::max);
            if ext[k] < left && ext[k] < right {
                waist = Some(waist.map_or(ext[k], |w: T| w.min(ext[k])));
            }
        }
    }
    waist.unwrap_or_else(|| ext.iter().copied().fold(T::zero(), T::max))
}
