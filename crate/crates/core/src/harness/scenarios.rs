//! Scripted frame sequences on which the ledger is compared against the
//! spacetime descent oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolver::{EventDetector, FlowEvent};
use crate::field::{build_grid, ScalarField};
use crate::homology::{
    betti1, core_circle, descent_uniqueness_check, meridian_loop, voxelize_revolution_in, SliceCycle, SpacetimeComplement,
    VoxelBox, VoxelRegion,
};
use crate::topo::{decompose, extract_contour, GeneratorStatus, HomologyLedger, LedgerFrame, LedgerSummary, TerminationKind};

const CORE: f64 = 1.1;
const VOXELS: usize = 16;

/// One slice of a scenario: a sphere or torus, or nothing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Torus { tube: f64 },
    Sphere { radius: f64 },
    Empty,
}

impl Shape {
    fn value(&self, r: f64, z: f64) -> f64 {
        match *self {
            Shape::Torus { tube } => (r - CORE).hypot(z) - tube,
            Shape::Sphere { radius } => r.hypot(z) - radius,
            Shape::Empty => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub times: Vec<f64>,
    pub shapes: Vec<Shape>,
}

/// Static torus, inward pinch (tube shrinks away), outward pinch (tube
/// swells over the axis) and a shrinking sphere, six slices each.
pub fn scripted_scenarios() -> Vec<Scenario> {
    let times: Vec<f64> = (0..6).map(|k| 0.1 * k as f64).collect();
    let tori = |tubes: &[f64]| tubes.iter().map(|&tube| Shape::Torus { tube }).collect::<Vec<_>>();
    let mut inward = tori(&[0.6, 0.5, 0.4, 0.3, 0.2]);
    inward.push(Shape::Empty);
    let mut sphere: Vec<Shape> = [1.2, 1.0, 0.8, 0.6, 0.4].iter().map(|&radius| Shape::Sphere { radius }).collect();
    sphere.push(Shape::Empty);
    vec![
        Scenario { name: "static".into(), times: times.clone(), shapes: tori(&[0.6; 6]) },
        Scenario { name: "inward_pinch".into(), times: times.clone(), shapes: inward },
        Scenario { name: "outward_pinch".into(), times: times.clone(), shapes: tori(&[0.6, 0.75, 0.9, 1.0, 1.15, 1.25]) },
        Scenario { name: "sphere_extinction".into(), times, shapes: sphere },
    ]
}

/// What the oracle says happened to a generator between the first and the
/// last slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Descent {
    /// No generator in the first slice.
    Absent,
    /// Descends only to a nontrivial class of the last slice.
    Nontrivial,
    /// Descends to the trivial class.
    Trivial,
    /// Descends to no class of the last slice.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub ledger: LedgerSummary<f64>,
    pub betti_in: Vec<usize>,
    pub betti_out: Vec<usize>,
    pub a0: Descent,
    pub b0: Descent,
    /// Descendant classes were unique whenever they existed.
    pub unique: bool,
    pub agrees: bool,
}

fn field_of(shape: Shape) -> Result<ScalarField<f64>> {
    let g = build_grid(3.25, -2.0, 2.0, 1.0 / 32.0)?;
    Ok(ScalarField::from_fn(g, |r, z| shape.value(r, z)))
}

fn voxel_box() -> VoxelBox {
    VoxelBox { half_width: 3.0, z_min: -1.6, z_max: 1.6 }
}

fn scenario_ledger(sc: &Scenario, fields: &[ScalarField<f64>]) -> Result<HomologyLedger<f64>> {
    let g = fields[0].grid;
    let mut det = EventDetector::new(&fields[0], 4.0 * g.h * g.h);
    let mut ledger: Option<HomologyLedger<f64>> = None;
    for (f, &t) in fields.iter().zip(&sc.times) {
        let (d, s) = decompose(&extract_contour(f), f)?;
        let frame = LedgerFrame { time: t, decomposition: &d, summary: &s };
        match ledger.as_mut() {
            None => ledger = Some(HomologyLedger::new(frame)),
            Some(l) => {
                let mut ev: Vec<FlowEvent<f64>> = det.check_axis(f, t);
                ev.extend(det.check_components(f, t));
                l.update(frame, &ev)?;
            }
        }
    }
    ledger.ok_or_else(|| Error::Argument("scenario has no slices".into()))
}

// representative of the generator in one slice, if the slice has one
fn representative(region: &VoxelRegion, shape: Shape, inside: bool) -> Result<Option<SliceCycle>> {
    if betti1(region) == 0 {
        return Ok(None);
    }
    let Shape::Torus { tube } = shape else {
        return Err(Error::Consistency("nontrivial H1 without a torus".into()));
    };
    Ok(Some(if inside { core_circle(region, CORE, 0.0)? } else { meridian_loop(region, CORE, 0.0, 0.5 * (CORE + tube))? }))
}

fn descent(st: &SpacetimeComplement, first: Option<SliceCycle>, last: Option<SliceCycle>, unique: &mut bool) -> Result<Descent> {
    let Some(g0) = first else { return Ok(Descent::Absent) };
    let candidates: Vec<SliceCycle> = last.into_iter().collect();
    let rep = descent_uniqueness_check(&g0, &candidates, st)?;
    *unique &= rep.unique;
    Ok(if rep.descends_to_zero() {
        Descent::Trivial
    } else if rep.descends() {
        Descent::Nontrivial
    } else {
        Descent::None
    })
}

/// Ledger verdict and oracle verdict for one scenario.
pub fn run_scenario(sc: &Scenario) -> Result<ScenarioReport> {
    let fields = sc.shapes.iter().map(|&s| field_of(s)).collect::<Result<Vec<_>>>()?;
    let ledger = scenario_ledger(sc, &fields)?;
    let masks = fields.iter().map(|f| voxelize_revolution_in(f, voxel_box(), VOXELS)).collect::<Result<Vec<_>>>()?;
    let (w_in, w_out): (Vec<VoxelRegion>, Vec<VoxelRegion>) = masks.into_iter().unzip();
    let betti_in: Vec<usize> = w_in.iter().map(betti1).collect();
    let betti_out: Vec<usize> = w_out.iter().map(betti1).collect();
    let last = sc.shapes.len() - 1;
    let mut unique = true;
    let st_in = SpacetimeComplement::new(w_in.clone())?;
    let a0 = descent(
        &st_in,
        representative(&w_in[0], sc.shapes[0], true)?,
        representative(&w_in[last], sc.shapes[last], true)?,
        &mut unique,
    )?;
    let st_out = SpacetimeComplement::new(w_out.clone())?;
    let b0 = descent(
        &st_out,
        representative(&w_out[0], sc.shapes[0], false)?,
        representative(&w_out[last], sc.shapes[last], false)?,
        &mut unique,
    )?;
    let expected = match (ledger.a0_status, ledger.b0_status) {
        (GeneratorStatus::Terminated { kind: TerminationKind::InwardNeck, .. }, _) => Some((Descent::None, Descent::Trivial)),
        (_, GeneratorStatus::Terminated { kind: TerminationKind::OutwardNeck, .. }) => Some((Descent::Trivial, Descent::None)),
        (GeneratorStatus::Alive, GeneratorStatus::Alive) => Some((Descent::Nontrivial, Descent::Nontrivial)),
        (GeneratorStatus::AliveTrivial, GeneratorStatus::AliveTrivial) => Some((Descent::Absent, Descent::Absent)),
        _ => None,
    };
    let agrees = unique && expected == Some((a0, b0));
    Ok(ScenarioReport { name: sc.name.clone(), ledger: ledger.summary(), betti_in, betti_out, a0, b0, unique, agrees })
}
