use crate::field::ScalarField;
use crate::real::Real;

pub(crate) const UNLABELED: u32 = u32::MAX;

/// Connected components of `{u < 0}` (or `{u >= 0}` when `inside` is
/// false) on the node grid. Four-neighbours are always adjacent; diagonal
/// neighbours are adjacent when the cell-centre average has their sign,
/// matching the saddle rule of the contour extraction.
pub(crate) struct Labels {
    pub labels: Vec<u32>,
    pub sizes: Vec<usize>,
}

pub(crate) fn label_components<T: Real>(field: &ScalarField<T>, inside: bool) -> Labels {
    let g = field.grid;
    let (w, hgt) = (g.width(), g.height());
    let member = |k: usize| (field.values[k] < T::zero()) == inside;
    let mut labels = vec![UNLABELED; g.len()];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for seed in 0..g.len() {
        if labels[seed] != UNLABELED || !member(seed) {
            continue;
        }
        let id = sizes.len() as u32;
        let mut size = 0;
        labels[seed] = id;
        stack.push(seed);
        while let Some(k) = stack.pop() {
            size += 1;
            let (i, j) = (k % w, k / w);
            let visit = |q: usize, labels: &mut Vec<u32>, stack: &mut Vec<usize>| {
                if labels[q] == UNLABELED && member(q) {
                    labels[q] = id;
                    stack.push(q);
                }
            };
            if i > 0 {
                visit(k - 1, &mut labels, &mut stack);
            }
            if i + 1 < w {
                visit(k + 1, &mut labels, &mut stack);
            }
            if j > 0 {
                visit(k - w, &mut labels, &mut stack);
            }
            if j + 1 < hgt {
                visit(k + w, &mut labels, &mut stack);
            }
            for (di, dj) in [(-1isize, -1isize), (1, -1), (-1, 1), (1, 1)] {
                let (ii, jj) = (i as isize + di, j as isize + dj);
                if ii < 0 || jj < 0 || ii >= w as isize || jj >= hgt as isize {
                    continue;
                }
                let q = jj as usize * w + ii as usize;
                // the other two corners of the shared cell
                let a = j * w + ii as usize;
                let b = jj as usize * w + i;
                if member(a) || member(b) {
                    // connected through an edge path already
                    continue;
                }
                let avg = field.values[k] + field.values[q] + field.values[a] + field.values[b];
                if (avg < T::zero()) == inside {
                    visit(q, &mut labels, &mut stack);
                }
            }
        }
        sizes.push(size);
    }
    Labels { labels, sizes }
}
