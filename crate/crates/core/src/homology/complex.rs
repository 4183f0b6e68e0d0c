use std::collections::HashMap;

/// Cubical complex of a voxel mask: every voxel in the mask is a vertex, and
/// a `k`-cube spanned by `k` lattice directions is present when all `2^k`
/// voxels at its corners are in the mask.
///
/// Cells are encoded as `voxel << D | axes`, where `axes` is the bit set of
/// directions the cell spans.
#[derive(Clone, Debug)]
pub struct CubicalComplex {
    dims: Vec<usize>,
    strides: Vec<usize>,
    cells: Vec<Vec<u64>>,
    lookup: Vec<HashMap<u64, u32>>,
}

impl CubicalComplex {
    /// `mask` is indexed with the first axis fastest.
    pub fn new(dims: &[usize], mask: &[bool]) -> Self {
        let d = dims.len();
        assert!((1..=6).contains(&d), "dimension out of range");
        assert_eq!(mask.len(), dims.iter().product::<usize>(), "mask size mismatch");
        let mut strides = vec![1usize; d];
        for i in 1..d {
            strides[i] = strides[i - 1] * dims[i - 1];
        }
        let mut cells = vec![Vec::new(); d + 1];
        let mut coord = vec![0usize; d];
        for v in 0..mask.len() {
            if v > 0 {
                // advance the mixed-radix coordinate
                let mut a = 0;
                loop {
                    coord[a] += 1;
                    if coord[a] < dims[a] {
                        break;
                    }
                    coord[a] = 0;
                    a += 1;
                }
            }
            if !mask[v] {
                continue;
            }
            'axes: for m in 0u64..(1 << d) {
                let mut far = v;
                for a in 0..d {
                    if m >> a & 1 == 1 {
                        if coord[a] + 1 >= dims[a] {
                            continue 'axes;
                        }
                        far += strides[a];
                    }
                }
                if !mask[far] {
                    continue;
                }
                // every corner of the cube
                let mut sub = m;
                loop {
                    let mut w = v;
                    for a in 0..d {
                        if sub >> a & 1 == 1 {
                            w += strides[a];
                        }
                    }
                    if !mask[w] {
                        continue 'axes;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & m;
                }
                cells[m.count_ones() as usize].push(((v as u64) << d) | m);
            }
        }
        for c in &mut cells {
            c.sort_unstable();
        }
        let lookup = cells
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, &code)| (code, i as u32)).collect())
            .collect();
        Self { dims: dims.to_vec(), strides, cells, lookup }
    }

    pub fn dimension(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    pub fn cells(&self, k: usize) -> &[u64] {
        &self.cells[k]
    }

    pub fn index_of(&self, k: usize, code: u64) -> Option<u32> {
        self.lookup.get(k)?.get(&code).copied()
    }

    /// Code of the cell anchored at `voxel` spanning `axes`.
    pub fn code(&self, voxel: usize, axes: u64) -> u64 {
        ((voxel as u64) << self.dims.len()) | axes
    }

    pub fn decode(&self, code: u64) -> (usize, u64) {
        let d = self.dims.len();
        ((code >> d) as usize, code & ((1 << d) - 1))
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Boundary of cell `idx` of dimension `k`, as sorted indices of
    /// `(k-1)`-cells, mod 2.
    pub fn boundary(&self, k: usize, idx: u32) -> Vec<u32> {
        if k == 0 {
            return Vec::new();
        }
        let (v, m) = self.decode(self.cells[k][idx as usize]);
        let mut out = Vec::with_capacity(2 * k);
        for a in 0..self.dims.len() {
            if m >> a & 1 == 0 {
                continue;
            }
            let face = m & !(1 << a);
            for w in [v, v + self.strides[a]] {
                let code = self.code(w, face);
                out.push(self.lookup[k - 1][&code]);
            }
        }
        out.sort_unstable();
        out
    }

    /// Boundary of a chain (sorted, mod 2).
    pub fn boundary_of_chain(&self, k: usize, chain: &[u32]) -> Vec<u32> {
        let mut acc: Vec<u32> = Vec::new();
        for &c in chain {
            acc = sym_diff(&acc, &self.boundary(k, c));
        }
        acc
    }

    /// Euler characteristic from the cell counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().enumerate().map(|(k, c)| if k % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) }).sum()
    }
}

/// Symmetric difference of two sorted index lists (addition mod 2).
pub fn sym_diff(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Normalizes a list of indices to a mod-2 chain: sorted, pairs cancelled.
pub fn normalize_chain(mut cells: Vec<u32>) -> Vec<u32> {
    cells.sort_unstable();
    let mut out: Vec<u32> = Vec::with_capacity(cells.len());
    for c in cells {
        if out.last() == Some(&c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_square() {
        let cx = CubicalComplex::new(&[2, 2], &[true; 4]);
        assert_eq!((cx.count(0), cx.count(1), cx.count(2)), (4, 4, 1));
        assert_eq!(cx.boundary(2, 0).len(), 4);
        assert_eq!(cx.euler_characteristic(), 1);
        assert!(cx.boundary_of_chain(1, &cx.boundary(2, 0)).is_empty());
    }

    #[test]
    fn missing_corner_drops_cells() {
        let cx = CubicalComplex::new(&[2, 2, 2], &[true, true, true, true, true, true, true, false]);
        assert_eq!(cx.count(3), 0);
        assert_eq!(cx.count(2), 3);
        assert_eq!(cx.count(1), 9);
    }

    #[test]
    fn chain_helpers() {
        assert_eq!(sym_diff(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert_eq!(normalize_chain(vec![5, 1, 5, 2, 1, 1]), vec![1, 2]);
    }
}
