//! Hand-counted voxel fixtures and their on-disk format.
//!
//! The binary file is the concatenation of bit-packed masks (voxel `v` is bit
//! `v % 8` of byte `v / 8`, `x` fastest). The JSON index lists, per fixture,
//! its name, lattice size, box, expected first Betti number, and the byte
//! offset and length of its mask in the binary file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::voxel::{VoxelBox, VoxelRegion};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub expected_b1: usize,
    pub region: VoxelRegion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureIndexEntry {
    pub name: String,
    pub n: usize,
    pub bbox: VoxelBox,
    pub expected_b1: usize,
    pub offset: usize,
    pub bytes: usize,
}

/// Ball, solid torus, thickened torus shell, two stacked solid tori, ball
/// with a tunnel, and the complement of a solid torus in the box. The shell
/// needs `n >= 24` to stay two voxels thick.
pub fn fixture_zoo(n: usize) -> Result<Vec<Fixture>> {
    if n < 24 {
        return Err(Error::Argument(format!("fixture zoo needs n >= 24, got {n}")));
    }
    let bbox = VoxelBox { half_width: 1.0, z_min: -1.0, z_max: 1.0 };
    let torus = |p: [f64; 3], core: f64, z: f64| (p[0].hypot(p[1]) - core).hypot(p[2] - z);
    let make = |name: &str, b1: usize, f: &dyn Fn([f64; 3]) -> bool| -> Result<Fixture> {
        Ok(Fixture { name: name.into(), expected_b1: b1, region: VoxelRegion::from_fn(n, bbox, f)? })
    };
    Ok(vec![
        make("ball", 0, &|p| p[0].hypot(p[1]).hypot(p[2]) < 0.7)?,
        make("solid_torus", 1, &|p| torus(p, 0.55, 0.0) < 0.25)?,
        make("torus_shell", 2, &|p| (0.12..0.32).contains(&torus(p, 0.55, 0.0)))?,
        make("stacked_tori", 2, &|p| torus(p, 0.55, -0.45) < 0.2 || torus(p, 0.55, 0.45) < 0.2)?,
        make("ball_with_tunnel", 1, &|p| p[0].hypot(p[1]).hypot(p[2]) < 0.75 && p[0].hypot(p[1]) > 0.22)?,
        make("torus_complement", 1, &|p| torus(p, 0.55, 0.0) > 0.35)?,
    ])
}

fn pack(mask: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; mask.len().div_ceil(8)];
    for (v, _) in mask.iter().enumerate().filter(|(_, &b)| b) {
        out[v / 8] |= 1 << (v % 8);
    }
    out
}

fn unpack(bytes: &[u8], len: usize) -> Vec<bool> {
    (0..len).map(|v| bytes[v / 8] >> (v % 8) & 1 == 1).collect()
}

/// Writes `<stem>.bin` and `<stem>.json` into `dir`.
pub fn write_fixtures(dir: &Path, stem: &str, fixtures: &[Fixture]) -> Result<Vec<FixtureIndexEntry>> {
    fs::create_dir_all(dir)?;
    let mut blob = Vec::new();
    let mut index = Vec::with_capacity(fixtures.len());
    for f in fixtures {
        let bytes = pack(&f.region.mask);
        index.push(FixtureIndexEntry {
            name: f.name.clone(),
            n: f.region.n,
            bbox: f.region.bbox,
            expected_b1: f.expected_b1,
            offset: blob.len(),
            bytes: bytes.len(),
        });
        blob.extend_from_slice(&bytes);
    }
    fs::write(dir.join(format!("{stem}.bin")), &blob)?;
    fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&index)?)?;
    Ok(index)
}

pub fn read_fixtures(dir: &Path, stem: &str) -> Result<Vec<Fixture>> {
    let blob = fs::read(dir.join(format!("{stem}.bin")))?;
    let index: Vec<FixtureIndexEntry> = serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
    index
        .into_iter()
        .map(|e| {
            let len = e.n * e.n * e.n;
            if e.bytes != len.div_ceil(8) || e.offset + e.bytes > blob.len() {
                return Err(Error::Argument(format!("fixture {} has an inconsistent index entry", e.name)));
            }
            let mask = unpack(&blob[e.offset..e.offset + e.bytes], len);
            Ok(Fixture { name: e.name, expected_b1: e.expected_b1, region: VoxelRegion { n: e.n, bbox: e.bbox, mask } })
        })
        .collect()
}
