use crate::real::Real;

// power series below, asymptotic expansion at and above
const SERIES_LIMIT: f64 = 15.0;

/// Exponentially scaled modified Bessel function `exp(-|x|) I0(x)`.
pub fn i0e<T: Real>(x: T) -> T {
    let x = x.abs();
    if x < T::lit(SERIES_LIMIT) {
        series(x) * (-x).exp()
    } else {
        asymptotic(x)
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn i0<T: Real>(x: T) -> T {
    let x = x.abs();
    if x < T::lit(SERIES_LIMIT) {
        series(x)
    } else {
        asymptotic(x) * x.exp()
    }
}

// sum of (x^2/4)^k / (k!)^2
fn series<T: Real>(x: T) -> T {
    let q = x * x / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = 1usize;
    while k < 200 {
        let kk = T::from_usize_lossy(k);
        term = term * q / (kk * kk);
        sum += term;
        if term < sum * T::epsilon() * T::lit(0.25) {
            break;
        }
        k += 1;
    }
    sum
}

// exp(-x) I0(x) ~ (2 pi x)^-1/2 * sum ((2k-1)!!)^2 / (k! (8x)^k), truncated
// at the smallest term
fn asymptotic<T: Real>(x: T) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    let eight_x = T::lit(8.0) * x;
    for k in 1..100usize {
        let kk = T::from_usize_lossy(k);
        let c = T::from_usize_lossy(2 * k - 1);
        let next = term * c * c / (kk * eight_x);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * T::epsilon() * T::lit(0.25) {
            break;
        }
    }
    sum / (T::lit(2.0) * T::PI() * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    // exp(-x) I0(x) = (1/pi) * integral_0^pi exp(x (cos(phi) - 1)) dphi; the
    // trapezoid rule is spectrally accurate for this periodic integrand
    fn azimuthal(x: f64) -> f64 {
        let n = 20000;
        let h = std::f64::consts::PI / n as f64;
        let f = |phi: f64| (x * (phi.cos() - 1.0)).exp();
        let mut s = 0.5 * (f(0.0) + f(std::f64::consts::PI));
        for k in 1..n {
            s += f(k as f64 * h);
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn matches_azimuthal_quadrature() {
        for &x in &[0.0, 1e-3, 0.5, 1.0, 3.7, 7.99, 8.0, 12.0, 14.99, 15.0, 15.01, 30.0, 100.0, 1e3] {
            let (a, b) = (i0e(x), azimuthal(x));
            assert!(((a - b) / b).abs() < 1e-10, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn known_values() {
        assert_eq!(i0(0.0f64), 1.0);
        // I0(1) = 1.2660658777520082 (tabulated)
        assert!((i0(1.0f64) - 1.2660658777520082).abs() < 1e-15);
        assert!((i0(-2.0f64) - i0(2.0)).abs() < 1e-15);
    }
}
