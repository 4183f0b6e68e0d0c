use serde::{Deserialize, Serialize};

use super::surface::SurfaceSpec;
use crate::error::{Error, Result};
use crate::profile::ProfileCurve;
use crate::real::Real;

/// What the family is built around.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "kind", rename_all = "snake_case")]
pub enum FamilyBase<T: Real> {
    Profile { profile: ProfileCurve<T> },
    Torus {
        core_radius: T,
        tube_radius: T,
        #[serde(default)]
        center_z: T,
    },
}

/// How the offset depends on the family parameter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMix {
    /// `delta(s) = delta_in (1 - s) + delta_out s`, constant mode amplitude.
    #[default]
    Linear,
    /// `delta(s) = -delta_out cos(pi s)`, mode amplitude `amplitude sin(pi s)`;
    /// requires `delta_in = -delta_out`.
    TwoMode,
}

/// A one-parameter family `s -> M^s` of tori around a base surface, with
/// `M^0` strictly inside and `M^1` strictly outside the base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FamilySpec<T: Real> {
    pub base: FamilyBase<T>,
    pub delta_in: T,
    pub delta_out: T,
    #[serde(default)]
    pub mode: u32,
    #[serde(default)]
    pub amplitude: T,
    #[serde(default)]
    pub mix: FamilyMix,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    9
}

impl<T: Real> FamilySpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_in < T::zero() && self.delta_out > T::zero()) {
            return Err(Error::Config(format!(
                "family needs delta_in < 0 < delta_out, got {} and {}",
                self.delta_in, self.delta_out
            )));
        }
        if self.mix == FamilyMix::TwoMode && (self.delta_in + self.delta_out).abs() > T::lit(1e-12) {
            return Err(Error::Config("two-mode family requires delta_in = -delta_out".into()));
        }
        if self.samples < 2 {
            return Err(Error::Config("family needs at least 2 samples".into()));
        }
        if let FamilyBase::Profile { profile } = &self.base {
            profile.validate()?;
            if !profile.closed {
                return Err(Error::Config("family base profile must be closed (torus type)".into()));
            }
        }
        Ok(())
    }

    /// `(normal offset, mode amplitude)` at parameter `s`.
    pub fn offsets(&self, s: T) -> (T, T) {
        match self.mix {
            FamilyMix::Linear => (self.delta_in * (T::one() - s) + self.delta_out * s, self.amplitude),
            FamilyMix::TwoMode => {
                let a = T::PI() * s;
                (-self.delta_out * a.cos(), self.amplitude * a.sin())
            }
        }
    }

    /// Evenly spaced sample parameters `0, 1/(n-1), ..., 1`.
    pub fn sample_parameters(&self) -> Vec<T> {
        let n = self.samples.max(2);
        (0..n).map(|k| T::from_usize_lossy(k) / T::from_usize_lossy(n - 1)).collect()
    }
}

/// Initial surface `M^s` of the family.
pub fn family_surface<T: Real>(family: &FamilySpec<T>, s: T) -> Result<SurfaceSpec<T>> {
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::Argument(format!("family parameter {s} outside [0, 1]")));
    }
    family.validate()?;
    let (offset, amplitude) = family.offsets(s);
    let spec = match &family.base {
        FamilyBase::Torus { core_radius, tube_radius, center_z } if amplitude == T::zero() || family.mode == 0 => {
            SurfaceSpec::Torus {
                core_radius: *core_radius,
                tube_radius: *tube_radius + offset + amplitude,
                center_z: *center_z,
            }
        }
        FamilyBase::Torus { core_radius, tube_radius, center_z } => SurfaceSpec::OffsetOfProfile {
            base: circle_profile(*core_radius, *tube_radius, *center_z, 512),
            offset,
            mode: family.mode,
            amplitude,
        },
        FamilyBase::Profile { profile } => SurfaceSpec::OffsetOfProfile {
            base: profile.clone(),
            offset,
            mode: family.mode,
            amplitude,
        },
    };
    spec.validate()?;
    Ok(spec)
}

/// Circle of radius `rho` around `(core, center_z)`, starting at its
/// innermost point and running counterclockwise.
pub fn circle_profile<T: Real>(core: T, rho: T, center_z: T, n: usize) -> ProfileCurve<T> {
    let pts: Vec<_> = (0..n)
        .map(|k| {
            let a = T::PI() + T::lit(2.0) * T::PI() * T::from_usize_lossy(k) / T::from_usize_lossy(n);
            (core + rho * a.cos(), center_z + rho * a.sin())
        })
        .collect();
    ProfileCurve::from_positions(&pts, true)
}
