use std::io::Write;

use serde::{Deserialize, Serialize};

use super::decompose::{RegionDecomposition, TopologySummary};
use crate::error::{Error, Result};
use crate::evolver::{FlowEvent, FlowEventKind};
use crate::real::Real;

/// Default significance threshold for in-components, in nodes (an area of
/// four grid cells).
pub const SIGNIFICANT_NODES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationKind {
    InwardNeck,
    OutwardNeck,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "state", rename_all = "snake_case")]
pub enum GeneratorStatus<T: Real> {
    Alive,
    /// The class still exists but bounds in the complement.
    AliveTrivial,
    Terminated { time: T, kind: TerminationKind, locus: (T, T) },
}

impl<T: Real> GeneratorStatus<T> {
    pub fn is_terminated(&self) -> bool {
        matches!(self, Self::Terminated { .. })
    }

    pub fn termination(&self) -> Option<(T, TerminationKind, (T, T))> {
        match *self {
            Self::Terminated { time, kind, locus } => Some((time, kind, locus)),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Alive => "alive",
            Self::AliveTrivial => "alive_trivial",
            Self::Terminated { kind: TerminationKind::InwardNeck, .. } => "terminated_inward_neck",
            Self::Terminated { kind: TerminationKind::OutwardNeck, .. } => "terminated_outward_neck",
            Self::Terminated { kind: TerminationKind::Indeterminate, .. } => "terminated_indeterminate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LedgerEntry<T: Real> {
    pub time: T,
    pub a0: GeneratorStatus<T>,
    pub b0: GeneratorStatus<T>,
    pub genus: usize,
    /// Neck width of the tracked solid-torus cross-section, while it exists.
    pub neck_width: Option<T>,
}

/// Status of the two generators tracked for a solid torus: `a0`, the core
/// circle inside it, and `b0`, the loop through its hole.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HomologyLedger<T: Real> {
    pub a0_status: GeneratorStatus<T>,
    pub b0_status: GeneratorStatus<T>,
    /// Tracked point inside the solid-torus cross-section.
    pub a0_basepoint: Option<(T, T)>,
    pub history: Vec<LedgerEntry<T>>,
    pub diagnostics: Vec<String>,
    /// In-components with fewer nodes count as vanished.
    pub min_nodes: usize,
    tracked_width: Option<T>,
    off_axis_count: usize,
    last_time: Option<T>,
    /// Axis contacts reported before the tracked cross-section reached the
    /// axis itself (contacts are detected a column early).
    #[serde(default)]
    pending_touches: Vec<FlowEvent<T>>,
}

/// One observed frame for the ledger.
#[derive(Clone, Copy, Debug)]
pub struct LedgerFrame<'a, T: Real> {
    pub time: T,
    pub decomposition: &'a RegionDecomposition<T>,
    pub summary: &'a TopologySummary,
}

impl<T: Real> HomologyLedger<T> {
    /// Initial ledger from the first frame. Both generators are alive when
    /// the initial surface bounds a solid torus; otherwise there is nothing
    /// to track and both are trivially alive.
    pub fn new(frame: LedgerFrame<'_, T>) -> Self {
        Self::with_min_nodes(frame, SIGNIFICANT_NODES)
    }

    pub fn with_min_nodes(frame: LedgerFrame<'_, T>, min_nodes: usize) -> Self {
        let d = frame.decomposition;
        let tracked = d
            .off_axis()
            .filter(|(_, c)| c.nodes >= min_nodes)
            .max_by(|a, b| a.1.area.partial_cmp(&b.1.area).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(_, c)| c);
        let (status, basepoint, width) = match tracked {
            Some(c) => (GeneratorStatus::Alive, Some(c.innermost), Some(c.neck_width)),
            None => (GeneratorStatus::AliveTrivial, None, None),
        };
        let mut ledger = Self {
            a0_status: status,
            b0_status: status,
            a0_basepoint: basepoint,
            history: Vec::new(),
            diagnostics: Vec::new(),
            min_nodes,
            tracked_width: width,
            off_axis_count: 0,
            last_time: Some(frame.time),
            pending_touches: Vec::new(),
        };
        ledger.off_axis_count = ledger.significant_off_axis(d);
        ledger.record(frame.time, frame.summary.genus);
        ledger
    }

    fn significant_off_axis(&self, d: &RegionDecomposition<T>) -> usize {
        d.off_axis().filter(|(_, c)| c.nodes >= self.min_nodes).count()
    }

    /// Time at which `a0` terminated, if it did.
    pub fn t_a0(&self) -> Option<T> {
        self.a0_status.termination().map(|t| t.0)
    }

    pub fn t_b0(&self) -> Option<T> {
        self.b0_status.termination().map(|t| t.0)
    }

    fn record(&mut self, time: T, genus: usize) {
        let neck_width = if self.a0_status == GeneratorStatus::Alive { self.tracked_width } else { None };
        self.history.push(LedgerEntry { time, a0: self.a0_status, b0: self.b0_status, genus, neck_width });
    }

    fn locate(&self, d: &RegionDecomposition<T>) -> Option<usize> {
        let bp = self.a0_basepoint?;
        if let Some(id) = d.component_at(bp) {
            return (d.in_components[id].nodes >= self.min_nodes).then_some(id);
        }
        // tolerate a basepoint that drifted just outside a thin tube
        let reach = self.tracked_width.unwrap_or(T::zero()) * T::lit(2.0)
            + d.grid.map_or(T::zero(), |g| T::lit(4.0) * g.h);
        d.in_components
            .iter()
            .enumerate()
            .filter(|(_, c)| c.nodes >= self.min_nodes)
            .map(|(i, c)| (i, (c.innermost.0 - bp.0).hypot(c.innermost.1 - bp.1)))
            .filter(|&(_, dist)| dist <= reach)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
    }

    /// Advances the ledger by one frame and the events detected since the
    /// previous frame.
    pub fn update(&mut self, frame: LedgerFrame<'_, T>, events: &[FlowEvent<T>]) -> Result<()> {
        if let Some(last) = self.last_time {
            if frame.time < last {
                return Err(Error::Argument(format!(
                    "ledger frame at t={} precedes the previous frame at t={}",
                    frame.time, last
                )));
            }
        }
        self.last_time = Some(frame.time);
        let d = frame.decomposition;
        let off_count = self.significant_off_axis(d);

        if self.a0_status == GeneratorStatus::Alive && self.b0_status == GeneratorStatus::Alive {
            let bp = self.a0_basepoint.unwrap_or((T::zero(), T::zero()));
            self.pending_touches.extend(events.iter().filter(|e| e.kind == FlowEventKind::AxisTouch).cloned());
            let held = std::mem::take(&mut self.pending_touches);
            let touches: Vec<&FlowEvent<T>> = held.iter().collect();
            let vanishes: Vec<&FlowEvent<T>> = events
                .iter()
                .filter(|e| e.kind == FlowEventKind::ComponentVanish && e.off_axis)
                .collect();
            let nearest = |evs: &[&FlowEvent<T>]| {
                evs.iter()
                    .min_by(|a, b| {
                        let da = (a.location.0 - bp.0).hypot(a.location.1 - bp.1);
                        let db = (b.location.0 - bp.0).hypot(b.location.1 - bp.1);
                        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
                    })
                    .map(|e| e.location)
            };
            let mut verdict: Option<(TerminationKind, (T, T))> = None;
            let mut why = String::new();
            match self.locate(d) {
                Some(id) if !d.in_components[id].touches_axis => {
                    if off_count > self.off_axis_count {
                        verdict = Some((TerminationKind::Indeterminate, bp));
                        why = format!("solid torus split into {off_count} off-axis components");
                    } else {
                        let c = &d.in_components[id];
                        self.a0_basepoint = Some(c.innermost);
                        self.tracked_width = Some(c.neck_width);
                        self.pending_touches = held.clone();
                    }
                }
                Some(_) => {
                    if !touches.is_empty() && vanishes.is_empty() {
                        verdict = Some((TerminationKind::OutwardNeck, nearest(&touches).unwrap_or(bp)));
                    } else {
                        verdict = Some((TerminationKind::Indeterminate, bp));
                        why = format!(
                            "tracked component reached the axis with {} axis touches and {} off-axis vanishings",
                            touches.len(),
                            vanishes.len()
                        );
                    }
                }
                None => {
                    if !vanishes.is_empty() && touches.is_empty() {
                        verdict = Some((TerminationKind::InwardNeck, nearest(&vanishes).unwrap_or(bp)));
                    } else {
                        verdict = Some((TerminationKind::Indeterminate, bp));
                        why = format!(
                            "tracked component lost with {} axis touches and {} off-axis vanishings",
                            touches.len(),
                            vanishes.len()
                        );
                    }
                }
            }
            if let Some((kind, locus)) = verdict {
                let term = GeneratorStatus::Terminated { time: frame.time, kind, locus };
                match kind {
                    TerminationKind::InwardNeck => {
                        self.a0_status = term;
                        self.b0_status = GeneratorStatus::AliveTrivial;
                    }
                    TerminationKind::OutwardNeck => {
                        self.b0_status = term;
                        self.a0_status = GeneratorStatus::AliveTrivial;
                    }
                    TerminationKind::Indeterminate => {
                        self.a0_status = term;
                        self.b0_status = term;
                        self.diagnostics.push(format!("t={}: {}", frame.time, why));
                    }
                }
                self.tracked_width = None;
            }
        }
        self.off_axis_count = off_count;
        self.record(frame.time, frame.summary.genus);
        Ok(())
    }

    /// Ledger history as CSV with columns `time,a0_status,b0_status,genus,neck_width`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "time,a0_status,b0_status,genus,neck_width")?;
        for e in &self.history {
            let w = e.neck_width.map(|w| w.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", e.time, e.a0.label(), e.b0.label(), e.genus, w)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> LedgerSummary<T> {
        LedgerSummary {
            a0: self.a0_status,
            b0: self.b0_status,
            t_a0: self.t_a0(),
            t_b0: self.t_b0(),
            frames: self.history.len(),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Compact JSON-friendly digest of a ledger.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LedgerSummary<T: Real> {
    pub a0: GeneratorStatus<T>,
    pub b0: GeneratorStatus<T>,
    pub t_a0: Option<T>,
    pub t_b0: Option<T>,
    pub frames: usize,
    pub diagnostics: Vec<String>,
}

/// Functional form of [`HomologyLedger::update`].
pub fn update_ledger<T: Real>(
    ledger: &HomologyLedger<T>,
    frame: LedgerFrame<'_, T>,
    events: &[FlowEvent<T>],
) -> Result<HomologyLedger<T>> {
    let mut next = ledger.clone();
    next.update(frame, events)?;
    Ok(next)
}
