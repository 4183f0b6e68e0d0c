//! Brute-force homology of voxelized complements.
//!
//! Frames are revolved into voxel masks of the inside and outside regions,
//! turned into cubical complexes (voxels as vertices) and reduced over Z/2.
//! Descent of a 1-cycle between two times is decided by solving for a
//! bounding 2-chain in a 4D complex of stacked masks.

mod complex;
mod fixtures;
mod reduce;
mod spacetime;
mod voxel;

pub use complex::{normalize_chain, sym_diff, CubicalComplex};
pub use fixtures::{fixture_zoo, read_fixtures, write_fixtures, Fixture, FixtureIndexEntry};
pub use reduce::{betti_numbers, boundary_ranks, reduce, Reduction};
pub use spacetime::{
    bounds_in, core_circle, descent_uniqueness_check, loop_through, meridian_loop, verify_descent, ChainWitness,
    SliceCycle, SpacetimeComplement, UniquenessReport, MAX_SLICES,
};
pub use voxel::{
    betti1, betti1_complement, check_h1_monotonicity, voxelize_revolution, voxelize_revolution_in, MonotonicityReport,
    VoxelBox, VoxelRegion, MAX_VOXELS_PER_AXIS,
};
