use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolver::EvolverConfig;
use crate::field::{build_grid, family_surface, AxiGrid, FamilyBase, FamilySpec, SurfaceSpec, GRID_MARGIN_CELLS};
use crate::shrinker::catalogue;

/// Settings shared by every experiment of the harness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessConfig {
    /// Grid spacing.
    pub h: f64,
    /// Minimal computational box; grown when a surface does not fit.
    pub r_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub t_max: f64,
    /// Frame cadence; also the time tolerance of the timeline checks.
    pub frame_dt: f64,
    pub cfl: f64,
    pub band: usize,
    pub reinit_every: usize,
    /// Worker threads for family sweeps; 0 uses all cores.
    pub workers: usize,
    /// Recorded in every report. No experiment draws random numbers.
    pub seed: u64,
    /// Rerun indeterminate classifications once at half the grid spacing.
    pub retry_indeterminate: bool,
    /// Voxel lattice size for the homology checks.
    pub voxel_n: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            h: 1.0 / 64.0,
            r_max: 4.0,
            z_min: -1.5,
            z_max: 1.5,
            t_max: 2.0,
            frame_dt: 0.01,
            cfl: 0.2,
            band: 5,
            reinit_every: 10,
            workers: 0,
            seed: 0,
            retry_indeterminate: true,
            voxel_n: 32,
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.t_max > 0.0 && self.frame_dt > 0.0) {
            return Err(Error::Config("h, t_max and frame_dt must be positive".into()));
        }
        self.evolver_config().validate()
    }

    pub fn evolver_config(&self) -> EvolverConfig<f64> {
        let mut c = EvolverConfig::new(self.t_max);
        c.cfl = self.cfl;
        c.band = self.band;
        c.reinit_every = self.reinit_every;
        c.frame_dt = Some(self.frame_dt);
        c
    }

    /// Copy with half the grid spacing (the time step follows).
    pub fn refined(&self) -> Self {
        Self { h: self.h * 0.5, ..self.clone() }
    }

    /// Grid containing the configured box and `spec` with a clearance of a
    /// few cells beyond the required margin.
    pub fn grid_for(&self, spec: &SurfaceSpec<f64>) -> Result<AxiGrid<f64>> {
        self.grid_for_all(std::slice::from_ref(spec))
    }

    pub fn grid_for_all(&self, specs: &[SurfaceSpec<f64>]) -> Result<AxiGrid<f64>> {
        let pad = (GRID_MARGIN_CELLS + 3) as f64 * self.h;
        let (mut r, mut lo, mut hi) = (self.r_max, self.z_min, self.z_max);
        for s in specs {
            let (r1, z0, z1) = s.extent()?;
            r = r.max(r1 + pad);
            lo = lo.min(z0 - pad);
            hi = hi.max(z1 + pad);
        }
        build_grid(r, lo, hi, self.h)
    }
}

/// Family of normal offsets of the catalogued torus shrinker, from `-delta`
/// (inside) at `s = 0` to `+delta` (outside) at `s = 1`.
pub fn shrinker_family(delta: f64, samples: usize) -> Result<FamilySpec<f64>> {
    let torus = catalogue(1e-10f64)?
        .into_iter()
        .find(|e| e.name == "torus")
        .ok_or_else(|| Error::Consistency("catalogue has no torus entry".into()))?;
    let f = FamilySpec {
        base: FamilyBase::Profile { profile: torus.profile },
        delta_in: -delta,
        delta_out: delta,
        mode: 0,
        amplitude: 0.0,
        mix: Default::default(),
        samples,
    };
    f.validate()?;
    Ok(f)
}

/// Member `s` of a family, validated.
pub fn family_member(family: &FamilySpec<f64>, s: f64) -> Result<SurfaceSpec<f64>> {
    family_surface(family, s)
}
