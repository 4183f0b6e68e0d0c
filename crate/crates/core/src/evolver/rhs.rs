use crate::field::ScalarField;
use crate::real::Real;

/// Right-hand side of the level set flow equation
/// `u_t = Laplace(u) - D^2u(Du, Du) / |Du|^2` for an axisymmetric `u(r, z)`:
///
/// `u_rr + u_zz + u_r / r - (u_r^2 u_rr + 2 u_r u_z u_rz + u_z^2 u_zz) / (u_r^2 + u_z^2 + eps^2)`
///
/// with second-order central differences. On the axis `u_r / r` is replaced
/// by its limit `u_rr`. Ghost values are the even reflection across the axis
/// and linear extrapolation across the outer boundary.
pub fn curvature_rhs<T: Real>(field: &ScalarField<T>, epsilon: T) -> ScalarField<T> {
    let g = field.grid;
    let mut values = vec![T::zero(); g.len()];
    for (k, v) in values.iter_mut().enumerate() {
        *v = node_rhs(field, k, epsilon);
    }
    ScalarField { grid: g, values }
}

#[inline]
pub(crate) fn node_rhs<T: Real>(field: &ScalarField<T>, k: usize, epsilon: T) -> T {
    let g = &field.grid;
    let w = g.width();
    let (i, j) = g.ij(k);
    let u = &field.values;
    let interior = i >= 1 && i + 1 < w && j >= 1 && j + 1 < g.height();
    let (c, e, wv, n, s, ne, nw, se, sw) = if interior {
        (
            u[k],
            u[k + 1],
            u[k - 1],
            u[k + w],
            u[k - w],
            u[k + w + 1],
            u[k + w - 1],
            u[k - w + 1],
            u[k - w - 1],
        )
    } else {
        let (i, j) = (i as isize, j as isize);
        (
            ext(field, i, j),
            ext(field, i + 1, j),
            ext(field, i - 1, j),
            ext(field, i, j + 1),
            ext(field, i, j - 1),
            ext(field, i + 1, j + 1),
            ext(field, i - 1, j + 1),
            ext(field, i + 1, j - 1),
            ext(field, i - 1, j - 1),
        )
    };
    let h = g.h;
    let h2 = h * h;
    let two = T::lit(2.0);
    let ur = (e - wv) / (two * h);
    let uz = (n - s) / (two * h);
    let urr = (e - two * c + wv) / h2;
    let uzz = (n - two * c + s) / h2;
    let urz = (ne - nw - se + sw) / (T::lit(4.0) * h2);
    let radial = if i == 0 { urr } else { ur / g.r(i) };
    let lap = urr + uzz + radial;
    let denom = ur * ur + uz * uz + epsilon * epsilon;
    lap - (ur * ur * urr + two * ur * uz * urz + uz * uz * uzz) / denom
}

// Ghost value: even across the axis, linear extrapolation at the outer walls.
#[inline]
fn ext<T: Real>(field: &ScalarField<T>, i: isize, j: isize) -> T {
    let (w, hgt) = (field.grid.width() as isize, field.grid.height() as isize);
    let i = i.abs();
    let ic = i.min(w - 1);
    let jc = j.clamp(0, hgt - 1);
    let at = |a: isize, b: isize| field.values[(b * w + a) as usize];
    let mut v = at(ic, jc);
    if i != ic {
        v += at(ic, jc) - at(2 * ic - i, jc);
    }
    if j != jc {
        let jm = (2 * jc - j).clamp(0, hgt - 1);
        v += at(ic, jc) - at(ic, jm);
    }
    v
}
