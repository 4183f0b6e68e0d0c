use serde::{Deserialize, Serialize};

use super::classify::{classify_flow, Classification, Label, RunArtifacts};
use super::config::HarnessConfig;
use crate::entropy::entropy;
use crate::error::{Error, Result};
use crate::evolver::{run_until_event, FlowFrame, FlowState};
use crate::field::{init_signed_distance, FamilySpec, SurfaceSpec};
use crate::homology::{
    betti_numbers, check_h1_monotonicity, fixture_zoo, read_fixtures, voxelize_revolution_in, write_fixtures, MonotonicityReport, VoxelBox,
};
use crate::profile::{point_segment_distance, segments, ProfileCurve};
use crate::topo::{estimate_pinch_time, Contour, LedgerSummary, PinchFit, SIGNIFICANT_NODES};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub ds: f64,
    pub s: f64,
    pub label: Label,
    /// Termination time of the class that terminates at the probed center;
    /// `None` when that class did not terminate.
    pub t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemicontinuityReport {
    pub s_star: f64,
    pub label: Label,
    pub t_star: f64,
    pub tolerance: f64,
    pub rows: Vec<ProbeRow>,
    pub violations: Vec<ProbeRow>,
}

impl SemicontinuityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Termination time of the class that terminates at `s_star`, for nearby
/// parameters `s_star +- ds`. A drop below `t(s_star)` by more than one frame
/// cadence is a violation.
pub fn termination_semicontinuity_probe(family: &FamilySpec<f64>, s_star: f64, radii: &[f64], config: &HarnessConfig) -> Result<SemicontinuityReport> {
    let center = classify_flow(family, s_star, config)?;
    probe_around(family, &center, radii, config)
}

/// As [`termination_semicontinuity_probe`] with a precomputed center.
pub fn probe_around(family: &FamilySpec<f64>, center: &Classification, radii: &[f64], config: &HarnessConfig) -> Result<SemicontinuityReport> {
    let s_star = center.s.ok_or_else(|| Error::Argument("center classification has no parameter".into()))?;
    let t_star = center
        .termination_time()
        .ok_or_else(|| Error::Argument(format!("s*={s_star} is not classified cleanly")))?;
    let mut params = Vec::new();
    for &ds in radii {
        for s in [s_star - ds, s_star + ds] {
            if (0.0..=1.0).contains(&s) {
                params.push((ds, s));
            }
        }
    }
    let ss: Vec<f64> = params.iter().map(|p| p.1).collect();
    let runs = super::bisect::classify_many(family, &ss, config)?;
    let rows: Vec<ProbeRow> = params
        .iter()
        .zip(&runs)
        .map(|(&(ds, s), c)| {
            let t = match center.label {
                Label::A => c.ledger.t_a0.filter(|_| c.label != Label::B),
                _ => c.ledger.t_b0.filter(|_| c.label != Label::A),
            };
            ProbeRow { ds, s, label: c.label, t }
        })
        .collect();
    let tolerance = config.frame_dt;
    let violations = rows.iter().filter(|r| r.t.is_some_and(|t| t < t_star - tolerance)).cloned().collect();
    Ok(SemicontinuityReport { s_star, label: center.label, t_star, tolerance, rows, violations })
}

/// Minimum distance between two contours in the half-plane, which is the
/// distance between the surfaces they generate.
pub fn contour_distance(a: &Contour<f64>, b: &Contour<f64>) -> Option<f64> {
    let one_way = |p: &Contour<f64>, q: &Contour<f64>| {
        let mut best = f64::INFINITY;
        for x in p.points() {
            for c in q.curves() {
                let closed = q.loops.iter().any(|l| std::ptr::eq(l, c));
                for (s, t) in segments(&c.points, closed) {
                    best = best.min(point_segment_distance(x, s, t));
                }
            }
        }
        best
    };
    if a.is_empty() || b.is_empty() {
        return None;
    }
    Some(one_way(a, b).min(one_way(b, a)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceReport {
    pub times: Vec<f64>,
    pub gaps: Vec<f64>,
    pub slack: f64,
    /// Largest drop of the gap below its running maximum.
    pub max_drop: f64,
    pub passed: bool,
}

/// Evolves two disjoint surfaces (side by side or nested) on a common grid
/// and records the distance between them at every common frame until one of
/// them vanishes. Surfaces closer than `4h` at the start are refused.
pub fn avoidance_check(spec_a: &SurfaceSpec<f64>, spec_b: &SurfaceSpec<f64>, config: &HarnessConfig) -> Result<AvoidanceReport> {
    config.validate()?;
    let grid = config.grid_for_all(&[spec_a.clone(), spec_b.clone()])?;
    let ua = init_signed_distance(spec_a, &grid)?;
    let ub = init_signed_distance(spec_b, &grid)?;
    let ec = config.evolver_config();
    let ra = run_until_event(FlowState::new(ua), &ec, &mut [])?;
    let rb = run_until_event(FlowState::new(ub), &ec, &mut [])?;
    let (mut times, mut gaps) = (Vec::new(), Vec::new());
    let mut j = 0;
    for fa in &ra.frames {
        while j < rb.frames.len() && rb.frames[j].step_index < fa.step_index {
            j += 1;
        }
        let Some(fb) = rb.frames.get(j).filter(|f| f.step_index == fa.step_index) else { continue };
        match contour_distance(&fa.contour, &fb.contour) {
            Some(d) => {
                times.push(fa.time);
                gaps.push(d);
            }
            None => break,
        }
    }
    let min_gap = 4.0 * config.h;
    match gaps.first() {
        Some(&g) if g >= min_gap => {}
        Some(&g) => return Err(Error::Setup(format!("initial gap {g} is below 4h = {min_gap}"))),
        None => return Err(Error::Setup("no common frames".into())),
    }
    let mut running = f64::NEG_INFINITY;
    let mut max_drop: f64 = 0.0;
    for &g in &gaps {
        running = running.max(g);
        max_drop = max_drop.max(running - g);
    }
    let slack = 2.0 * config.h;
    Ok(AvoidanceReport { times, gaps, slack, max_drop, passed: max_drop <= slack })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenusTimeline {
    pub genus: Vec<(f64, usize)>,
    /// Time of the first frame with genus 0 after genus 1.
    pub drop_time: Option<f64>,
    pub termination_time: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Genus 1 before the first termination and 0 after, within one cadence.
pub fn genus_timeline_check(art: &RunArtifacts) -> GenusTimeline {
    let genus: Vec<(f64, usize)> = art.frames().iter().map(|f| (f.time, RunArtifacts::genus(f))).collect();
    let mut drop_time = None;
    for w in genus.windows(2) {
        if w[0].1 >= 1 && w[1].1 == 0 {
            drop_time = Some(w[1].0);
            break;
        }
    }
    let termination_time = match (art.ledger.t_a0(), art.ledger.t_b0()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let tol = art.frame_dt;
    let passed = match termination_time {
        Some(t) => {
            let before = genus.iter().filter(|g| g.0 < t - tol).all(|g| g.1 == 1);
            let after = genus.iter().filter(|g| g.0 > t + tol).all(|g| g.1 == 0);
            before && after && drop_time.is_some_and(|d| (d - t).abs() <= tol)
        }
        None => genus.windows(2).all(|w| w[0].1 == w[1].1),
    };
    GenusTimeline { genus, drop_time, termination_time, tolerance: tol, passed }
}

/// Generating curves of a frame as profiles.
pub fn contour_profiles(contour: &Contour<f64>) -> Vec<ProfileCurve<f64>> {
    let mut out: Vec<ProfileCurve<f64>> = contour.loops.iter().map(|l| ProfileCurve::from_positions(&l.points, true)).collect();
    out.extend(contour.arcs.iter().map(|a| ProfileCurve::from_positions(&a.points, false)));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub slack: f64,
    pub max_increase: f64,
    pub passed: bool,
}

/// Entropy at up to `samples` evenly spread frames of a run, skipping
/// frames whose surface is already below `min_nodes` inside nodes.
pub fn entropy_along_run(frames: &[FlowFrame<f64>], samples: usize, slack: f64) -> Result<EntropyTrace> {
    let usable: Vec<&FlowFrame<f64>> = frames
        .iter()
        .filter(|f| f.decomposition.in_components.iter().map(|c| c.nodes).sum::<usize>() >= 64 * SIGNIFICANT_NODES)
        .collect();
    if usable.len() < 2 {
        return Err(Error::Argument("run has fewer than two frames with a resolved surface".into()));
    }
    let k = samples.max(2).min(usable.len());
    let picks: Vec<&FlowFrame<f64>> = (0..k).map(|i| usable[i * (usable.len() - 1) / (k - 1)]).collect();
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for f in picks {
        times.push(f.time);
        values.push(entropy(&contour_profiles(&f.contour))?.value);
    }
    let mut max_increase: f64 = 0.0;
    let mut lowest = f64::INFINITY;
    for &v in &values {
        max_increase = max_increase.max(v - lowest);
        lowest = lowest.min(v);
    }
    Ok(EntropyTrace { times, values, slack, max_increase, passed: max_increase <= slack })
}

/// `b1` of the voxelized complement at every frame of a run kept with its
/// fields, in a box fitted to the first frame.
pub fn run_h1_monotonicity(frames: &[FlowFrame<f64>], n: usize) -> Result<MonotonicityReport> {
    let fields: Vec<_> = frames.iter().filter_map(|f| f.field.as_ref()).collect();
    if fields.len() != frames.len() {
        return Err(Error::Argument("run was not kept with its fields".into()));
    }
    let bbox = VoxelBox::fit(fields[0], n);
    let masks = fields.iter().map(|f| voxelize_revolution_in(*f, bbox, n)).collect::<Result<Vec<_>>>()?;
    check_h1_monotonicity(&masks)
}

/// JSON digest of a run's ledger.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub summary: LedgerSummary<f64>,
    /// Fit of the tracked neck width over the last frames before the first
    /// termination, when the width was decreasing there.
    pub neck_fit: Option<PinchFit<f64>>,
}

pub fn ledger_report(art: &RunArtifacts) -> LedgerReport {
    let summary = art.ledger.summary();
    let end = match (summary.t_a0, summary.t_b0) {
        (Some(a), Some(b)) => a.min(b),
        (a, b) => a.or(b).unwrap_or(f64::INFINITY),
    };
    let pts: Vec<(f64, f64)> = art.ledger.history.iter().filter(|e| e.time < end).filter_map(|e| e.neck_width.map(|w| (e.time, w))).collect();
    let tail = &pts[pts.len().saturating_sub(8)..];
    let (t, w): (Vec<f64>, Vec<f64>) = tail.iter().copied().unzip();
    LedgerReport { summary, neck_fit: estimate_pinch_time(&t, &w).ok() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureRow {
    pub name: String,
    pub expected_b1: usize,
    /// Betti numbers of the fixture as read back from disk.
    pub betti: Vec<usize>,
    /// The mask survived the write/read round trip unchanged.
    pub round_trip: bool,
}

impl FixtureRow {
    pub fn passed(&self) -> bool {
        self.round_trip && self.betti.get(1).copied().unwrap_or(0) == self.expected_b1
    }
}

/// Writes the fixture zoo to `dir` as `zoo.bin` / `zoo.json`, reads it back
/// and computes the Betti numbers of every fixture.
pub fn fixture_zoo_check(n: usize, dir: &std::path::Path) -> Result<Vec<FixtureRow>> {
    let zoo = fixture_zoo(n)?;
    write_fixtures(dir, "zoo", &zoo)?;
    let back = read_fixtures(dir, "zoo")?;
    if back.len() != zoo.len() {
        return Err(Error::Consistency("fixture index lost entries".into()));
    }
    Ok(zoo
        .iter()
        .zip(&back)
        .map(|(a, b)| FixtureRow {
            name: b.name.clone(),
            expected_b1: b.expected_b1,
            betti: betti_numbers(&b.region.complex()),
            round_trip: a == b,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_grid, ScalarField};
    use crate::topo::extract_contour;

    fn circle_contour(radius: f64, h: f64) -> Contour<f64> {
        let g = build_grid(3.0, -3.0, 3.0, h).unwrap();
        extract_contour(&ScalarField::from_fn(g, |r, z| r.hypot(z) - radius))
    }

    #[test]
    fn concentric_circles_are_their_radius_gap_apart() {
        let h = 1.0 / 32.0;
        let (a, b) = (circle_contour(1.0, h), circle_contour(2.0, h));
        let d = contour_distance(&a, &b).unwrap();
        assert!((d - 1.0).abs() < h, "{d}");
        assert_eq!(contour_distance(&a, &b), contour_distance(&b, &a));
        assert!(contour_distance(&a, &Contour { loops: vec![], arcs: vec![], clipped: vec![] }).is_none());
    }

    #[test]
    fn profiles_follow_the_contour() {
        let c = circle_contour(1.0, 1.0 / 16.0);
        let p = contour_profiles(&c);
        assert_eq!(p.len(), c.loops.len() + c.arcs.len());
        assert!(p.iter().all(|x| !x.closed));
    }

    #[test]
    fn fixture_rows_pass_on_the_zoo() {
        let dir = std::env::temp_dir().join(format!("neckflow-checks-{}", std::process::id()));
        let rows = fixture_zoo_check(24, &dir).unwrap();
        assert!(rows.iter().all(FixtureRow::passed), "{rows:?}");
        std::fs::remove_dir_all(&dir).ok();
    }
}
