use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::real::Real;
use crate::topo::components::{label_components, UNLABELED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowEventKind {
    /// The inside region reached the axis at a fresh spot (a hole closed).
    AxisTouch,
    /// A tracked inside cross-section dropped below the area threshold.
    ComponentVanish,
    /// No inside region of significant area is left.
    AllVanish,
    /// The time horizon was reached.
    Horizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FlowEvent<T: Real> {
    pub kind: FlowEventKind,
    pub time: T,
    pub location: (T, T),
    /// For `ComponentVanish`: whether the vanished cross-section was
    /// disjoint from the axis.
    #[serde(default)]
    pub off_axis: bool,
}

#[derive(Clone, Debug)]
struct Tracked<T> {
    nodes: Vec<usize>,
    innermost: (T, T),
    touches_axis: bool,
}

/// Detects discrete events by comparing successive fields.
///
/// `AxisTouch` fires when a node with `r <= h` turns negative while none of
/// its axis-column neighbours (within two rows) was negative before, so the
/// growth of an existing contact does not re-fire. `ComponentVanish` fires
/// for every previously significant inside component that no longer
/// overlaps a significant component; significance is area `>= min_area`.
#[derive(Clone, Debug)]
pub struct EventDetector<T: Real> {
    min_area: T,
    axis_neg: Vec<bool>,
    tracked: Vec<Tracked<T>>,
    any_significant: bool,
    all_vanished: bool,
}

impl<T: Real> EventDetector<T> {
    pub fn new(field: &ScalarField<T>, min_area: T) -> Self {
        let mut d = Self {
            min_area,
            axis_neg: axis_signs(field),
            tracked: Vec::new(),
            any_significant: false,
            all_vanished: false,
        };
        d.tracked = d.components(field);
        d.any_significant = !d.tracked.is_empty();
        d
    }

    /// Whether the field has no significant inside region.
    pub fn all_vanished(&self) -> bool {
        self.all_vanished || !self.any_significant
    }

    /// Cheap per-step check of the two node columns nearest the axis.
    pub fn check_axis(&mut self, field: &ScalarField<T>, time: T) -> Vec<FlowEvent<T>> {
        let now = axis_signs(field);
        let g = field.grid;
        let rows = g.height();
        let mut events = Vec::new();
        let mut j = 0;
        while j < rows {
            let fresh = (0..2).any(|i| now[2 * j + i] && !self.axis_neg[2 * j + i]);
            if fresh {
                let lo = j.saturating_sub(2);
                let hi = (j + 2).min(rows - 1);
                let had_contact = (lo..=hi).any(|jj| self.axis_neg[2 * jj] || self.axis_neg[2 * jj + 1]);
                if !had_contact {
                    // one event per contact patch, placed at its deepest axis node
                    let mut deepest = (field.at(0, j), j);
                    while j < rows && (now[2 * j] || now[2 * j + 1]) {
                        if field.at(0, j) < deepest.0 {
                            deepest = (field.at(0, j), j);
                        }
                        j += 1;
                    }
                    events.push(FlowEvent {
                        kind: FlowEventKind::AxisTouch,
                        time,
                        location: (T::zero(), g.z(deepest.1)),
                        off_axis: false,
                    });
                    continue;
                }
            }
            j += 1;
        }
        self.axis_neg = now;
        events
    }

    /// Component bookkeeping; call at the detection cadence.
    pub fn check_components(&mut self, field: &ScalarField<T>, time: T) -> Vec<FlowEvent<T>> {
        let current = self.components(field);
        let lab = label_components(field, true);
        let significant: Vec<bool> = lab
            .sizes
            .iter()
            .map(|&n| T::from_usize_lossy(n) * field.grid.h * field.grid.h >= self.min_area)
            .collect();
        let mut events = Vec::new();
        for prev in &self.tracked {
            let alive = prev.nodes.iter().any(|&k| {
                let id = lab.labels[k];
                id != UNLABELED && significant[id as usize]
            });
            if !alive {
                events.push(FlowEvent {
                    kind: FlowEventKind::ComponentVanish,
                    time,
                    location: prev.innermost,
                    off_axis: !prev.touches_axis,
                });
            }
        }
        if current.is_empty() && !self.all_vanished {
            self.all_vanished = true;
            let location = self.tracked.first().map_or((T::zero(), T::zero()), |t| t.innermost);
            events.push(FlowEvent { kind: FlowEventKind::AllVanish, time, location, off_axis: false });
        }
        self.tracked = current;
        events
    }

    fn components(&self, field: &ScalarField<T>) -> Vec<Tracked<T>> {
        let g = field.grid;
        let lab = label_components(field, true);
        let n = lab.sizes.len();
        let mut nodes = vec![Vec::new(); n];
        let mut touches = vec![false; n];
        let mut deepest = vec![(T::infinity(), 0usize); n];
        for (k, &id) in lab.labels.iter().enumerate() {
            if id == UNLABELED {
                continue;
            }
            let id = id as usize;
            nodes[id].push(k);
            if k % g.width() == 0 {
                touches[id] = true;
            }
            if field.values[k] < deepest[id].0 {
                deepest[id] = (field.values[k], k);
            }
        }
        (0..n)
            .filter(|&id| T::from_usize_lossy(lab.sizes[id]) * g.h * g.h >= self.min_area)
            .map(|id| Tracked {
                nodes: std::mem::take(&mut nodes[id]),
                innermost: g.node(deepest[id].1),
                touches_axis: touches[id],
            })
            .collect()
    }
}

fn axis_signs<T: Real>(field: &ScalarField<T>) -> Vec<bool> {
    let g = field.grid;
    let mut out = Vec::with_capacity(2 * g.height());
    for j in 0..g.height() {
        out.push(field.at(0, j) < T::zero());
        out.push(g.nr >= 1 && field.at(1, j) < T::zero());
    }
    out
}
