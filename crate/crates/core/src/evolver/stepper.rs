use serde::{Deserialize, Serialize};

use super::events::{EventDetector, FlowEvent, FlowEventKind};
use super::rhs::node_rhs;
use crate::error::{Error, Result};
use crate::field::{reinitialize_banded, ScalarField};
use crate::real::Real;
use crate::topo::{decompose, extract_contour, Contour, RegionDecomposition, TopologySummary};

fn default_cfl<T: Real>() -> T {
    T::lit(0.2)
}
fn default_reinit_every() -> usize {
    10
}
fn default_band() -> usize {
    5
}
fn default_vanish_cells() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EvolverConfig<T: Real> {
    /// Gradient regularization; `None` means one grid spacing.
    #[serde(default)]
    pub epsilon: Option<T>,
    #[serde(default = "default_cfl")]
    pub cfl: T,
    pub t_max: T,
    /// Reinitialize every this many steps; 0 disables it.
    #[serde(default = "default_reinit_every")]
    pub reinit_every: usize,
    /// Narrow-band half-width in cells; 0 updates the whole grid.
    #[serde(default = "default_band")]
    pub band: usize,
    /// Frame cadence in flow time; `None` emits frames only at events and at
    /// the start and end of the run.
    #[serde(default)]
    pub frame_dt: Option<T>,
    /// Inside regions of fewer nodes (area in units of `h^2`) count as vanished.
    #[serde(default = "default_vanish_cells")]
    pub vanish_cells: usize,
    /// Keep a copy of the field in every frame.
    #[serde(default)]
    pub keep_fields: bool,
}

impl<T: Real> EvolverConfig<T> {
    pub fn new(t_max: T) -> Self {
        Self {
            epsilon: None,
            cfl: default_cfl(),
            t_max,
            reinit_every: default_reinit_every(),
            band: default_band(),
            frame_dt: None,
            vanish_cells: default_vanish_cells(),
            keep_fields: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.epsilon {
            if !(e > T::zero()) {
                return Err(Error::Config(format!("epsilon must be positive, got {e}")));
            }
        }
        if !(self.cfl > T::zero() && self.cfl <= T::lit(0.25)) {
            return Err(Error::Config(format!("cfl must lie in (0, 0.25], got {}", self.cfl)));
        }
        if !(self.t_max > T::zero()) {
            return Err(Error::Config(format!("t_max must be positive, got {}", self.t_max)));
        }
        if let Some(f) = self.frame_dt {
            if !(f > T::zero()) {
                return Err(Error::Config(format!("frame_dt must be positive, got {f}")));
            }
        }
        if self.band != 0 && self.band < 3 {
            return Err(Error::Config(format!("band must be 0 or at least 3 cells, got {}", self.band)));
        }
        Ok(())
    }

    pub fn epsilon_for(&self, h: T) -> T {
        self.epsilon.unwrap_or(h)
    }

    pub fn dt_for(&self, h: T) -> T {
        self.cfl * h * h
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FlowState<T: Real> {
    pub time: T,
    pub field: ScalarField<T>,
    pub step_index: usize,
}

impl<T: Real> FlowState<T> {
    pub fn new(field: ScalarField<T>) -> Self {
        Self { time: T::zero(), field, step_index: 0 }
    }
}

/// One explicit Euler step of the whole grid, followed by reinitialization
/// when the step index hits the schedule.
pub fn step<T: Real>(state: &FlowState<T>, config: &EvolverConfig<T>) -> Result<FlowState<T>> {
    let g = state.field.grid;
    let eps = config.epsilon_for(g.h);
    let dt = config.dt_for(g.h);
    let mut values = state.field.values.clone();
    for (k, v) in values.iter_mut().enumerate() {
        *v += dt * node_rhs(&state.field, k, eps);
    }
    let step_index = state.step_index + 1;
    let mut field = ScalarField { grid: g, values };
    check_finite(&field, step_index)?;
    if config.reinit_every > 0 && step_index % config.reinit_every == 0 && field.has_interface() {
        field = reinitialize_banded(&field, 0)?.0;
    }
    Ok(FlowState { time: state.time + dt, field, step_index })
}

fn check_finite<T: Real>(field: &ScalarField<T>, step: usize) -> Result<()> {
    if let Some(k) = field.values.iter().position(|v| !v.is_finite()) {
        let (r, z) = field.grid.node(k);
        return Err(Error::Blowup { step, detail: format!("non-finite value at node {k} (r={r}, z={z})") });
    }
    Ok(())
}

/// Stateful stepper that updates only a narrow band around the zero set
/// when `band > 0`.
#[derive(Clone, Debug)]
pub struct Evolver<T: Real> {
    pub state: FlowState<T>,
    pub config: EvolverConfig<T>,
    active: Option<Vec<usize>>,
    scratch: Vec<T>,
}

impl<T: Real> Evolver<T> {
    pub fn new(state: FlowState<T>, config: EvolverConfig<T>) -> Result<Self> {
        config.validate()?;
        if !state.field.is_finite() {
            return Err(Error::Argument("initial field is not finite".into()));
        }
        let mut ev = Self { state, config, active: None, scratch: Vec::new() };
        ev.refresh_band(false)?;
        Ok(ev)
    }

    pub fn dt(&self) -> T {
        self.config.dt_for(self.state.field.grid.h)
    }

    fn refresh_band(&mut self, reinit: bool) -> Result<()> {
        if !self.state.field.has_interface() {
            self.active = Some(Vec::new());
            return Ok(());
        }
        if reinit {
            let (f, active) = reinitialize_banded(&self.state.field, self.config.band)?;
            self.state.field = f;
            self.active = (self.config.band > 0).then_some(active);
        } else if self.config.band > 0 {
            let (_, active) = reinitialize_banded(&self.state.field, self.config.band)?;
            self.active = Some(active);
        }
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        let g = self.state.field.grid;
        let eps = self.config.epsilon_for(g.h);
        let dt = self.dt();
        let field = &self.state.field;
        self.scratch.clear();
        match &self.active {
            Some(active) => self.scratch.extend(active.iter().map(|&k| field.values[k] + dt * node_rhs(field, k, eps))),
            None => self.scratch.extend((0..g.len()).map(|k| field.values[k] + dt * node_rhs(field, k, eps))),
        }
        self.state.step_index += 1;
        self.state.time += dt;
        if let Some(pos) = self.scratch.iter().position(|v| !v.is_finite()) {
            let k = self.active.as_ref().map_or(pos, |a| a[pos]);
            let (r, z) = g.node(k);
            return Err(Error::Blowup {
                step: self.state.step_index,
                detail: format!("non-finite value at node {k} (r={r}, z={z}), t={}", self.state.time),
            });
        }
        match &self.active {
            Some(active) => {
                for (&k, &v) in active.iter().zip(&self.scratch) {
                    self.state.field.values[k] = v;
                }
            }
            None => std::mem::swap(&mut self.state.field.values, &mut self.scratch),
        }
        let every = self.config.reinit_every;
        if every > 0 && self.state.step_index % every == 0 {
            self.refresh_band(true)?;
        } else if every == 0 && self.config.band > 0 && self.state.step_index % default_reinit_every() == 0 {
            self.refresh_band(false)?;
        }
        Ok(())
    }
}

/// Snapshot of the flow with its topological reading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FlowFrame<T: Real> {
    pub time: T,
    pub step_index: usize,
    pub contour: Contour<T>,
    pub decomposition: RegionDecomposition<T>,
    pub summary: TopologySummary,
    /// Events detected since the previous frame.
    pub events: Vec<FlowEvent<T>>,
    /// Set once a singular event has occurred: the frame is a level set
    /// scheme continuation past a singular time.
    pub post_singular: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<ScalarField<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    AllVanish,
    Horizon,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FlowRun<T: Real> {
    pub frames: Vec<FlowFrame<T>>,
    pub events: Vec<FlowEvent<T>>,
    pub stop: StopReason,
    #[serde(skip)]
    pub final_state: Option<FlowState<T>>,
}

/// Receives frames as they are produced.
pub trait FlowObserver<T: Real> {
    fn on_frame(&mut self, frame: &FlowFrame<T>) -> Result<()>;
}

impl<T: Real, F: FnMut(&FlowFrame<T>) -> Result<()>> FlowObserver<T> for F {
    fn on_frame(&mut self, frame: &FlowFrame<T>) -> Result<()> {
        self(frame)
    }
}

fn make_frame<T: Real>(state: &FlowState<T>, events: Vec<FlowEvent<T>>, post: bool, keep: bool) -> Result<FlowFrame<T>> {
    let contour = extract_contour(&state.field);
    let (decomposition, summary) = decompose(&contour, &state.field)?;
    Ok(FlowFrame {
        time: state.time,
        step_index: state.step_index,
        contour,
        decomposition,
        summary,
        events,
        post_singular: post,
        field: keep.then(|| state.field.clone()),
    })
}

/// Evolves until every inside region has vanished or the horizon is reached.
///
/// Frames are emitted at the start, every `frame_dt`, at every step where an
/// event is detected, and at the end. Axis contacts are checked every step;
/// component extinction at the reinitialization cadence.
pub fn run_until_event<T: Real>(
    state: FlowState<T>,
    config: &EvolverConfig<T>,
    observers: &mut [&mut dyn FlowObserver<T>],
) -> Result<FlowRun<T>> {
    config.validate()?;
    let g = state.field.grid;
    let min_area = T::from_usize_lossy(config.vanish_cells) * g.h * g.h;
    let mut detector = EventDetector::new(&state.field, min_area);
    let mut frames = Vec::new();
    let mut all_events = Vec::new();
    let mut pending: Vec<FlowEvent<T>> = Vec::new();
    let mut post = false;
    let mut emit = |frame: FlowFrame<T>, frames: &mut Vec<FlowFrame<T>>| -> Result<()> {
        for o in observers.iter_mut() {
            o.on_frame(&frame)?;
        }
        frames.push(frame);
        Ok(())
    };

    if detector.all_vanished() {
        let ev = FlowEvent { kind: FlowEventKind::AllVanish, time: state.time, location: (T::zero(), T::zero()), off_axis: false };
        all_events.push(ev.clone());
        emit(make_frame(&state, vec![ev], false, config.keep_fields)?, &mut frames)?;
        return Ok(FlowRun { frames, events: all_events, stop: StopReason::AllVanish, final_state: Some(state) });
    }
    emit(make_frame(&state, Vec::new(), false, config.keep_fields)?, &mut frames)?;

    let detect_every = if config.reinit_every > 0 { config.reinit_every } else { default_reinit_every() };
    let mut evolver = Evolver::new(state, config.clone())?;
    let mut next_frame = config.frame_dt.map(|f| f);
    let stop = loop {
        evolver.step()?;
        let s = &evolver.state;
        let horizon = s.time >= config.t_max;
        let due = next_frame.map_or(false, |t| s.time >= t);
        let mut fresh = detector.check_axis(&s.field, s.time);
        // a frame never shows a component gone before its event
        if s.step_index % detect_every == 0 || !fresh.is_empty() || due || horizon {
            fresh.extend(detector.check_components(&s.field, s.time));
        }
        let vanished = fresh.iter().any(|e| e.kind == FlowEventKind::AllVanish);
        let singular = fresh.iter().any(|e| matches!(e.kind, FlowEventKind::AxisTouch | FlowEventKind::ComponentVanish));
        let had_events = !fresh.is_empty();
        all_events.extend(fresh.iter().cloned());
        pending.extend(fresh);
        if had_events || due || horizon {
            if horizon && !vanished {
                let ev = FlowEvent { kind: FlowEventKind::Horizon, time: s.time, location: (T::zero(), T::zero()), off_axis: false };
                all_events.push(ev.clone());
                pending.push(ev);
            }
            let frame = make_frame(s, std::mem::take(&mut pending), post, config.keep_fields)?;
            emit(frame, &mut frames)?;
            if let (Some(t), Some(f)) = (next_frame.as_mut(), config.frame_dt) {
                while *t <= s.time {
                    *t += f;
                }
            }
        }
        post |= singular;
        if vanished {
            break StopReason::AllVanish;
        }
        if horizon {
            break StopReason::Horizon;
        }
    };
    Ok(FlowRun { frames, events: all_events, stop, final_state: Some(evolver.state) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_grid, init_signed_distance, SurfaceSpec};

    #[test]
    fn config_validation() {
        let mut c = EvolverConfig::new(1.0f64);
        assert!(c.validate().is_ok());
        c.cfl = 0.3;
        assert!(c.validate().is_err());
        c.cfl = 0.2;
        c.epsilon = Some(0.0);
        assert!(c.validate().is_err());
        let c: EvolverConfig<f64> = serde_json::from_str(r#"{"t_max": 0.5}"#).unwrap();
        assert_eq!(c.cfl, 0.2);
        assert_eq!(c.band, 5);
    }

    #[test]
    fn plane_is_unchanged() {
        let g = build_grid(1.0f64, -1.0, 1.0, 1.0 / 16.0).unwrap();
        let u = ScalarField::from_fn(g, |_, z| z - 0.03);
        let mut cfg = EvolverConfig::new(1.0);
        cfg.reinit_every = 0;
        let mut s = FlowState::new(u.clone());
        for _ in 0..20 {
            s = step(&s, &cfg).unwrap();
        }
        assert!(s.field.max_abs_diff(&u) < 1e-12);
        assert!((s.time - 20.0 * 0.2 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn empty_field_vanishes_at_start() {
        let g = build_grid(1.0f64, -1.0, 1.0, 1.0 / 16.0).unwrap();
        let run = run_until_event(FlowState::new(ScalarField::constant(g, 1.0)), &EvolverConfig::new(1.0), &mut []).unwrap();
        assert_eq!(run.stop, StopReason::AllVanish);
        assert_eq!(run.events.len(), 1);
        assert_eq!(run.events[0].time, 0.0);
    }

    #[test]
    fn blowup_is_reported() {
        let g = build_grid(1.0f64, -1.0, 1.0, 1.0 / 16.0).unwrap();
        let mut u = ScalarField::from_fn(g, |r, z| r.hypot(z) - 0.5);
        u.values[40] = f64::NAN;
        let mut cfg = EvolverConfig::new(1.0);
        cfg.reinit_every = 0;
        assert!(matches!(step(&FlowState::new(u), &cfg), Err(Error::Blowup { step: 1, .. })));
    }

    #[test]
    fn small_sphere_vanishes_near_law() {
        let h = 1.0 / 32.0;
        let g = build_grid(1.0f64, -1.0, 1.0, h).unwrap();
        let u = init_signed_distance(&SurfaceSpec::Sphere { center_z: 0.0, radius: 0.5 }, &g).unwrap();
        let run = run_until_event(FlowState::new(u), &EvolverConfig::new(1.0), &mut []).unwrap();
        assert_eq!(run.stop, StopReason::AllVanish);
        let t = run.events.last().unwrap().time;
        assert!((t - 0.0625).abs() < 0.01, "{t}");
    }
}
