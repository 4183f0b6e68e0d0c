//! Level-set mean curvature flow of rotationally symmetric surfaces in R^3,
//! with tracking of the homology of the complement through singularities,
//! self-shrinker shooting and Gaussian-density entropy.
//!
//! The numerical modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the experiment harness uses.

pub mod entropy;
pub mod error;
pub mod evolver;
pub mod field;
pub mod harness;
pub mod homology;
pub mod profile;
pub mod real;
pub mod shrinker;
pub mod topo;

pub use error::{Error, Result};
pub use real::Real;

pub type Grid = field::AxiGrid<f64>;
pub type Field = field::ScalarField<f64>;
pub type Surface = field::SurfaceSpec<f64>;
pub type Family = field::FamilySpec<f64>;
pub type Profile = profile::ProfileCurve<f64>;
pub type EvolverConfig = evolver::EvolverConfig<f64>;
pub type FlowState = evolver::FlowState<f64>;
pub type FlowFrame = evolver::FlowFrame<f64>;
pub type Contour = topo::Contour<f64>;
pub type Ledger = topo::HomologyLedger<f64>;
