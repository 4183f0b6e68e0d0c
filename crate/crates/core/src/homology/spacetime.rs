use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::complex::{normalize_chain, sym_diff, CubicalComplex};
use super::reduce::{reduce, Reduction};
use super::voxel::VoxelRegion;
use crate::error::{Error, Result};

/// Largest number of time slices in a spacetime complex.
pub const MAX_SLICES: usize = 8;

/// A 1-chain in one voxel slice: edges `(voxel, axis)` with `axis` in `0..3`
/// pointing from `voxel` to its neighbour along that axis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceCycle {
    pub edges: Vec<(usize, u8)>,
}

impl SliceCycle {
    /// Mod-2 normalized cycle from a possibly repeating edge list.
    pub fn new(mut edges: Vec<(usize, u8)>) -> Self {
        edges.sort_unstable();
        let mut out: Vec<(usize, u8)> = Vec::with_capacity(edges.len());
        for e in edges {
            if out.last() == Some(&e) {
                out.pop();
            } else {
                out.push(e);
            }
        }
        Self { edges: out }
    }

    /// Closed lattice walk through the given voxels (consecutive voxels must
    /// be face adjacent; the walk is closed back to the first voxel).
    pub fn from_walk(n: usize, walk: &[usize]) -> Result<Self> {
        let mut edges = Vec::with_capacity(walk.len());
        for k in 0..walk.len() {
            let (a, b) = (walk[k], walk[(k + 1) % walk.len()]);
            if a == b {
                continue;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            let axis = match hi - lo {
                1 => 0,
                d if d == n => 1,
                d if d == n * n => 2,
                _ => return Err(Error::Argument(format!("voxels {a} and {b} are not adjacent"))),
            };
            edges.push((lo, axis));
        }
        Ok(Self::new(edges))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut e = self.edges.clone();
        e.extend_from_slice(&other.edges);
        Self::new(e)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edge indices in the 3D complex of `region`; errors when an edge is
    /// not in the region.
    pub(crate) fn indices(&self, cx: &CubicalComplex) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(self.edges.len());
        for &(v, a) in &self.edges {
            let code = cx.code(v, 1 << a);
            out.push(cx.index_of(1, code).ok_or_else(|| Error::Argument(format!("edge ({v}, {a}) is not in the mask")))?);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Whether the chain is supported in `region` and has zero boundary.
    pub fn check_in(&self, region: &VoxelRegion) -> Result<()> {
        let cx = region.complex();
        let idx = self.indices(&cx)?;
        if !cx.boundary_of_chain(1, &idx).is_empty() {
            return Err(Error::Argument("chain is not a cycle".into()));
        }
        Ok(())
    }
}

/// Voxel masks stacked along a time axis into a 4D cubical complex. Cells
/// that span the time direction exist over the intersection of consecutive
/// masks.
#[derive(Debug)]
pub struct SpacetimeComplement {
    pub slices: Vec<VoxelRegion>,
    complex: CubicalComplex,
    reduction: OnceLock<Reduction>,
}

/// Result of a descent query: the two cycles and, when they are
/// homologous in spacetime, a 2-chain bounding their sum. Cells are 4D codes
/// `voxel << 4 | axes` with the time axis as bit 3.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainWitness {
    pub gamma0: Vec<u64>,
    pub gamma1: Vec<u64>,
    pub chain: Option<Vec<u64>>,
}

impl ChainWitness {
    pub fn descends(&self) -> bool {
        self.chain.is_some()
    }
}

impl SpacetimeComplement {
    pub fn new(slices: Vec<VoxelRegion>) -> Result<Self> {
        if slices.is_empty() {
            return Err(Error::Argument("spacetime needs at least one slice".into()));
        }
        if slices.len() > MAX_SLICES {
            return Err(Error::Resource(format!("{} slices exceed {MAX_SLICES}", slices.len())));
        }
        for s in &slices[1..] {
            slices[0].same_lattice(s)?;
        }
        let n = slices[0].n;
        let mut mask = Vec::with_capacity(n * n * n * slices.len());
        for s in &slices {
            mask.extend_from_slice(&s.mask);
        }
        let complex = CubicalComplex::new(&[n, n, n, slices.len()], &mask);
        Ok(Self { slices, complex, reduction: OnceLock::new() })
    }

    pub fn complex(&self) -> &CubicalComplex {
        &self.complex
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Mask of slice `k` read back from the complex vertices.
    pub fn slice_mask(&self, k: usize) -> Vec<bool> {
        let n3 = self.slices[0].mask.len();
        let mut out = vec![false; n3];
        for &code in self.complex.cells(0) {
            let (v, _) = self.complex.decode(code);
            if v / n3 == k {
                out[v % n3] = true;
            }
        }
        out
    }

    fn lift(&self, cycle: &SliceCycle, slice: usize) -> Result<(Vec<u32>, Vec<u64>)> {
        if slice >= self.slices.len() {
            return Err(Error::Argument(format!("slice {slice} out of range")));
        }
        cycle.check_in(&self.slices[slice])?;
        let n3 = self.slices[0].mask.len();
        let mut idx = Vec::with_capacity(cycle.edges.len());
        let mut codes = Vec::with_capacity(cycle.edges.len());
        for &(v, a) in &cycle.edges {
            let code = self.complex.code(slice * n3 + v, 1 << a);
            idx.push(self.complex.index_of(1, code).ok_or_else(|| Error::Consistency("lifted edge missing".into()))?);
            codes.push(code);
        }
        Ok((idx, codes))
    }

    /// Solves `d2 x = gamma0 + gamma1` with `gamma0` in slice `from` and
    /// `gamma1` in slice `to`. The returned chain is checked by evaluating
    /// its boundary directly.
    pub fn verify_descent(&self, gamma0: &SliceCycle, from: usize, gamma1: &SliceCycle, to: usize) -> Result<ChainWitness> {
        let (i0, c0) = self.lift(gamma0, from)?;
        let (i1, c1) = self.lift(gamma1, to)?;
        let target = sym_diff(&normalize_chain(i0), &normalize_chain(i1));
        let red = self.reduction.get_or_init(|| reduce(&self.complex, 2, None, true));
        let chain = match red.solve(&target) {
            Some(x) => {
                if self.complex.boundary_of_chain(2, &x) != target {
                    return Err(Error::Consistency("descent witness fails its boundary check".into()));
                }
                Some(x.iter().map(|&i| self.complex.cells(2)[i as usize]).collect())
            }
            None => None,
        };
        Ok(ChainWitness { gamma0: c0, gamma1: c1, chain })
    }
}

/// Convenience wrapper over [`SpacetimeComplement::verify_descent`] from the
/// first to the last slice.
pub fn verify_descent(gamma0: &SliceCycle, gamma1: &SliceCycle, spacetime: &SpacetimeComplement) -> Result<ChainWitness> {
    spacetime.verify_descent(gamma0, 0, gamma1, spacetime.len() - 1)
}

/// Whether a cycle bounds within a single region.
pub fn bounds_in(region: &VoxelRegion, cycle: &SliceCycle) -> Result<bool> {
    let cx = region.complex();
    let idx = cycle.indices(&cx)?;
    Ok(reduce(&cx, 2, None, true).solve(&idx).is_some())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    /// Bit sets over the candidates whose sums admit a descent witness; bit
    /// set 0 is the empty cycle.
    pub successes: Vec<u32>,
    /// Differences of all successful targets bound in the final slice.
    pub unique: bool,
}

impl UniquenessReport {
    pub fn descends(&self) -> bool {
        !self.successes.is_empty()
    }

    /// A successful target whose class is trivial (the empty sum).
    pub fn descends_to_zero(&self) -> bool {
        self.successes.contains(&0)
    }
}

/// Tries every sum of `candidates` (cycles in the last slice) as a descent
/// target of `gamma0` (in the first slice) and checks that the successful
/// targets form a single homology class of the last slice.
pub fn descent_uniqueness_check(gamma0: &SliceCycle, candidates: &[SliceCycle], spacetime: &SpacetimeComplement) -> Result<UniquenessReport> {
    if candidates.len() > 8 {
        return Err(Error::Resource(format!("{} candidate cycles exceed 8", candidates.len())));
    }
    let last = spacetime.len() - 1;
    let target = |bits: u32| {
        candidates.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).fold(SliceCycle::default(), |acc, (_, c)| acc.sum(c))
    };
    let mut successes = Vec::new();
    for bits in 0..(1u32 << candidates.len()) {
        if spacetime.verify_descent(gamma0, 0, &target(bits), last)?.descends() {
            successes.push(bits);
        }
    }
    let mut unique = true;
    if let Some(&first) = successes.first() {
        for &b in &successes[1..] {
            if !bounds_in(&spacetime.slices[last], &target(first ^ b))? {
                unique = false;
            }
        }
    }
    Ok(UniquenessReport { successes, unique })
}

/// Closed loop through the voxels nearest to `points`, joining consecutive
/// ones by shortest paths inside the region.
pub fn loop_through(region: &VoxelRegion, points: &[[f64; 3]]) -> Result<SliceCycle> {
    if points.len() < 3 {
        return Err(Error::Argument("a loop needs at least three points".into()));
    }
    let anchors = points
        .iter()
        .map(|&p| region.nearest(p).ok_or_else(|| Error::Argument("region is empty".into())))
        .collect::<Result<Vec<_>>>()?;
    let mut walk = Vec::new();
    for k in 0..anchors.len() {
        let (a, b) = (anchors[k], anchors[(k + 1) % anchors.len()]);
        let path = region.path(a, b).ok_or_else(|| Error::Argument("loop points lie in different components".into()))?;
        walk.extend_from_slice(&path[..path.len() - 1]);
    }
    SliceCycle::from_walk(region.n, &walk)
}

/// Circle of radius `radius` around the `z` axis at height `z`: the core of
/// a solid torus.
pub fn core_circle(region: &VoxelRegion, radius: f64, z: f64) -> Result<SliceCycle> {
    let pts: Vec<[f64; 3]> = (0..32)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 32.0;
            [radius * a.cos(), radius * a.sin(), z]
        })
        .collect();
    loop_through(region, &pts)
}

/// Circle of radius `radius` in the `xz` half-plane `y = 0, x > 0` around the
/// point `(center_r, 0, center_z)`: a meridian around a tube, passing through
/// the hole.
pub fn meridian_loop(region: &VoxelRegion, center_r: f64, center_z: f64, radius: f64) -> Result<SliceCycle> {
    let pts: Vec<[f64; 3]> = (0..32)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / 32.0;
            [center_r + radius * a.cos(), 0.0, center_z + radius * a.sin()]
        })
        .collect();
    loop_through(region, &pts)
}
