use super::complex::{sym_diff, CubicalComplex};

/// Column reduction of the boundary matrix `d_k` over Z/2.
#[derive(Clone, Debug, Default)]
pub struct Reduction {
    pub k: usize,
    pub rank: usize,
    /// `pivot[row]` is the column whose reduced form has lowest entry `row`.
    pub pivot: Vec<Option<u32>>,
    /// Reduced columns, present for pivot columns only.
    pub reduced: Vec<Option<Vec<u32>>>,
    /// For each pivot column, the original columns summing to its reduced
    /// form (when tracked).
    pub combination: Vec<Option<Vec<u32>>>,
}

impl Reduction {
    /// Rows that are pivots, i.e. `(k-1)`-cells whose `d_{k-1}` column
    /// reduces to zero.
    pub fn pivot_rows(&self) -> Vec<bool> {
        self.pivot.iter().map(Option::is_some).collect()
    }

    /// Solves `d_k x = b` for a `(k-1)`-chain `b`; returns `x` as sorted
    /// `k`-cell indices, or `None` when `b` is not a boundary. Requires a
    /// tracked reduction without cleared columns.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        let mut b = b.to_vec();
        let mut x: Vec<u32> = Vec::new();
        while let Some(&low) = b.last() {
            let col = self.pivot.get(low as usize).copied().flatten()?;
            b = sym_diff(&b, self.reduced[col as usize].as_ref()?);
            x = sym_diff(&x, self.combination[col as usize].as_ref()?);
        }
        Some(x)
    }
}

/// Reduces `d_k`, skipping the columns flagged in `skip` (known to reduce to
/// zero), optionally tracking column combinations.
pub fn reduce(cx: &CubicalComplex, k: usize, skip: Option<&[bool]>, track: bool) -> Reduction {
    let ncols = cx.count(k);
    let nrows = if k == 0 { 0 } else { cx.count(k - 1) };
    let mut red = Reduction {
        k,
        rank: 0,
        pivot: vec![None; nrows],
        reduced: vec![None; ncols],
        combination: vec![None; ncols],
    };
    if k == 0 {
        return red;
    }
    for j in 0..ncols as u32 {
        if skip.is_some_and(|s| s[j as usize]) {
            continue;
        }
        let mut col = cx.boundary(k, j);
        let mut comb = if track { vec![j] } else { Vec::new() };
        while let Some(&low) = col.last() {
            match red.pivot[low as usize] {
                Some(p) => {
                    col = sym_diff(&col, red.reduced[p as usize].as_ref().expect("pivot column stored"));
                    if track {
                        comb = sym_diff(&comb, red.combination[p as usize].as_ref().expect("tracked"));
                    }
                }
                None => {
                    red.pivot[low as usize] = Some(j);
                    red.rank += 1;
                    break;
                }
            }
        }
        if !col.is_empty() {
            red.reduced[j as usize] = Some(col);
            if track {
                red.combination[j as usize] = Some(comb);
            }
        }
    }
    red
}

/// Ranks of all boundary maps, top dimension first, with clearing: columns of
/// `d_k` whose cell is a pivot row of the reduced `d_{k+1}` are skipped.
pub fn boundary_ranks(cx: &CubicalComplex) -> Vec<usize> {
    let d = cx.dimension();
    let mut ranks = vec![0; d + 1];
    let mut clear: Option<Vec<bool>> = None;
    for k in (1..=d).rev() {
        let red = reduce(cx, k, clear.as_deref(), false);
        ranks[k] = red.rank;
        clear = Some(red.pivot_rows());
    }
    ranks
}

/// Betti numbers over Z/2.
pub fn betti_numbers(cx: &CubicalComplex) -> Vec<usize> {
    let ranks = boundary_ranks(cx);
    let d = cx.dimension();
    (0..=d)
        .map(|k| {
            let next = if k < d { ranks[k + 1] } else { 0 };
            cx.count(k) - ranks[k] - next
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_ring_has_one_loop() {
        // 3x3 with the centre removed
        let mut mask = [true; 9];
        mask[4] = false;
        let cx = CubicalComplex::new(&[3, 3], &mask);
        assert_eq!(betti_numbers(&cx), vec![1, 1, 0]);
    }

    #[test]
    fn solve_finds_filling() {
        let cx = CubicalComplex::new(&[3, 3], &[true; 9]);
        let red = reduce(&cx, 2, None, true);
        // boundary of the whole 2x2 block
        let all: Vec<u32> = (0..cx.count(2) as u32).collect();
        let b = cx.boundary_of_chain(2, &all);
        let x = red.solve(&b).unwrap();
        assert_eq!(cx.boundary_of_chain(2, &x), b);
        // a single edge is not a boundary
        assert!(red.solve(&[0]).is_none());
    }
}
