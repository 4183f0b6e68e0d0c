use serde::{Deserialize, Serialize};

use super::config::{family_member, HarnessConfig};
use crate::error::{Error, Result};
use crate::evolver::{run_until_event, FlowEvent, FlowEventKind, FlowFrame, FlowRun, FlowState, StopReason};
use crate::field::{init_signed_distance, FamilySpec, SurfaceSpec};
use crate::topo::{GeneratorStatus, HomologyLedger, LedgerFrame, LedgerSummary, TerminationKind, SIGNIFICANT_NODES};

/// A completed flow with its ledger.
#[derive(Debug)]
pub struct RunArtifacts {
    pub run: FlowRun<f64>,
    pub ledger: HomologyLedger<f64>,
    pub h: f64,
    pub frame_dt: f64,
}

impl RunArtifacts {
    pub fn frames(&self) -> &[FlowFrame<f64>] {
        &self.run.frames
    }

    /// Genus counted from significant off-axis inside cross-sections, each
    /// of which sweeps out a solid torus.
    pub fn genus(frame: &FlowFrame<f64>) -> usize {
        frame.decomposition.off_axis().filter(|(_, c)| c.nodes >= SIGNIFICANT_NODES).count()
    }
}

/// Builds the ledger of a finished run.
pub fn ledger_for(frames: &[FlowFrame<f64>]) -> Result<HomologyLedger<f64>> {
    let first = frames.first().ok_or_else(|| Error::Argument("run has no frames".into()))?;
    let mut ledger = HomologyLedger::new(LedgerFrame { time: first.time, decomposition: &first.decomposition, summary: &first.summary });
    for f in &frames[1..] {
        ledger.update(LedgerFrame { time: f.time, decomposition: &f.decomposition, summary: &f.summary }, &f.events)?;
    }
    Ok(ledger)
}

/// Evolves `spec` on the harness grid and tracks its ledger.
pub fn simulate(spec: &SurfaceSpec<f64>, config: &HarnessConfig, keep_fields: bool) -> Result<RunArtifacts> {
    config.validate()?;
    let grid = config.grid_for(spec)?;
    let u = init_signed_distance(spec, &grid)?;
    let mut ec = config.evolver_config();
    ec.keep_fields = keep_fields;
    let run = run_until_event(FlowState::new(u), &ec, &mut [])?;
    let ledger = ledger_for(&run.frames)?;
    Ok(RunArtifacts { run, ledger, h: config.h, frame_dt: config.frame_dt })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    /// `a0` (inside generator) terminated at an inward neck.
    A,
    /// `b0` (outside generator) terminated at an outward neck.
    B,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub s: Option<f64>,
    pub label: Label,
    pub ledger: LedgerSummary<f64>,
    /// Termination time of `a0` (`None` when it did not terminate).
    pub t_in: Option<f64>,
    pub t_out: Option<f64>,
    pub cause: Option<String>,
    /// Grid spacing of the run that produced the label.
    pub h: f64,
    pub stop: StopReason,
    /// The termination coincides, within one frame cadence, with an event of
    /// the matching kind.
    pub event_consistent: bool,
    pub retried: bool,
}

impl Classification {
    pub fn is_clean(&self) -> bool {
        self.label != Label::Indeterminate
    }

    /// Termination time of the generator that terminated.
    pub fn termination_time(&self) -> Option<f64> {
        match self.label {
            Label::A => self.t_in,
            Label::B => self.t_out,
            Label::Indeterminate => None,
        }
    }
}

/// Label of a finished run.
pub fn classify_run(art: &RunArtifacts, s: Option<f64>) -> Classification {
    let ledger = art.ledger.summary();
    let (a0, b0) = (art.ledger.a0_status, art.ledger.b0_status);
    let (label, cause) = match (a0, b0) {
        (GeneratorStatus::Terminated { kind: TerminationKind::InwardNeck, .. }, _) => (Label::A, None),
        (_, GeneratorStatus::Terminated { kind: TerminationKind::OutwardNeck, .. }) => (Label::B, None),
        (GeneratorStatus::Terminated { .. }, _) => (Label::Indeterminate, Some(format!("ledger: {}", ledger.diagnostics.join("; ")))),
        (GeneratorStatus::Alive, GeneratorStatus::Alive) if art.run.stop == StopReason::Horizon => {
            (Label::Indeterminate, Some("horizon reached with both generators alive (under-resolved)".into()))
        }
        (GeneratorStatus::Alive, GeneratorStatus::Alive) => {
            (Label::Indeterminate, Some("surface vanished with both generators alive".into()))
        }
        _ => (Label::Indeterminate, Some("initial surface has no solid torus".into())),
    };
    let matching = |kind: FlowEventKind, off_axis: bool, t: f64| {
        art.run
            .events
            .iter()
            .any(|e: &FlowEvent<f64>| e.kind == kind && (kind != FlowEventKind::ComponentVanish || e.off_axis == off_axis) && (e.time - t).abs() <= art.frame_dt)
    };
    let event_consistent = match label {
        Label::A => ledger.t_a0.is_some_and(|t| matching(FlowEventKind::ComponentVanish, true, t)),
        Label::B => ledger.t_b0.is_some_and(|t| matching(FlowEventKind::AxisTouch, false, t)),
        Label::Indeterminate => true,
    };
    Classification {
        s,
        label,
        t_in: ledger.t_a0.filter(|_| label == Label::A),
        t_out: ledger.t_b0.filter(|_| label == Label::B),
        ledger,
        cause,
        h: art.h,
        stop: art.run.stop,
        event_consistent,
        retried: false,
    }
}

/// Runs member `s` of the family to extinction or the horizon and returns
/// the ledger verdict, retrying once at half the grid spacing when the
/// verdict is indeterminate.
pub fn classify_flow(family: &FamilySpec<f64>, s: f64, config: &HarnessConfig) -> Result<Classification> {
    let spec = family_member(family, s)?;
    let c = classify_run(&simulate(&spec, config, false)?, Some(s));
    if c.is_clean() || !config.retry_indeterminate {
        return Ok(c);
    }
    let mut fine = classify_run(&simulate(&spec, &config.refined(), false)?, Some(s));
    fine.retried = true;
    if !fine.is_clean() {
        fine.cause = Some(format!("{} (also at h={}: {})", c.cause.unwrap_or_default(), config.h, fine.cause.clone().unwrap_or_default()));
    }
    Ok(fine)
}
