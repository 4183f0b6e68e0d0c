use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Model rate of `w^2` for a neck modelled on the shrinking cylinder.
pub const CYLINDRICAL_RATE: f64 = 2.0;
/// Model rate of `w^2` for the shrinking sphere.
pub const SPHERICAL_RATE: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinchModel {
    Cylindrical,
    Spherical,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PinchFit<T: Real> {
    /// Extrapolated pinch time, the root of the fitted `w^2`.
    pub t_star: T,
    /// `|d(w^2)/dt|` of the fit.
    pub rate: T,
    pub model: PinchModel,
    /// Root-mean-square residual of the fit in `w^2`.
    pub residual: T,
}

/// Least-squares fit of `w^2` against `t`.
pub fn estimate_pinch_time<T: Real>(times: &[T], widths: &[T]) -> Result<PinchFit<T>> {
    if times.len() != widths.len() {
        return Err(Error::Argument(format!("{} times but {} widths", times.len(), widths.len())));
    }
    if times.len() < 4 {
        return Err(Error::Argument(format!("pinch fit needs at least 4 samples, got {}", times.len())));
    }
    if times.iter().chain(widths).any(|v| !v.is_finite()) {
        return Err(Error::Argument("non-finite sample".into()));
    }
    let n = T::from_usize_lossy(times.len());
    let y: Vec<T> = widths.iter().map(|w| *w * *w).collect();
    let tm = times.iter().fold(T::zero(), |a, &b| a + b) / n;
    let ym = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (t, v) in times.iter().zip(&y) {
        sxy += (*t - tm) * (*v - ym);
        sxx += (*t - tm) * (*t - tm);
    }
    if sxx <= T::zero() {
        return Err(Error::Argument("all samples at the same time".into()));
    }
    let slope = sxy / sxx;
    if slope >= T::zero() {
        return Err(Error::NoPinch);
    }
    let intercept = ym - slope * tm;
    let t_star = -intercept / slope;
    let rate = slope.abs();
    let residual = (times
        .iter()
        .zip(&y)
        .map(|(t, v)| {
            let e = *v - (intercept + slope * *t);
            e * e
        })
        .fold(T::zero(), |a, b| a + b)
        / n)
        .sqrt();
    let model = if (rate - T::lit(CYLINDRICAL_RATE)).abs() <= T::lit(0.4) {
        PinchModel::Cylindrical
    } else if (rate - T::lit(SPHERICAL_RATE)).abs() <= T::lit(0.8) {
        PinchModel::Spherical
    } else {
        PinchModel::Other
    };
    Ok(PinchFit { t_star, rate, model, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_cylinder_series() {
        let t: Vec<f64> = (0..8).map(|k| k as f64 * 0.05).collect();
        let w: Vec<f64> = t.iter().map(|t| (2.0 * (0.5 - t)).sqrt()).collect();
        let fit = estimate_pinch_time(&t, &w).unwrap();
        assert!((fit.t_star - 0.5).abs() < 1e-12);
        assert!((fit.rate - 2.0).abs() < 1e-12);
        assert_eq!(fit.model, PinchModel::Cylindrical);
    }

    #[test]
    fn sphere_series_is_flagged() {
        let t: Vec<f64> = (0..6).map(|k| k as f64 * 0.04).collect();
        let w: Vec<f64> = t.iter().map(|t| (1.0 - 4.0 * t).sqrt()).collect();
        let fit = estimate_pinch_time(&t, &w).unwrap();
        assert!((fit.rate - 4.0).abs() < 1e-12);
        assert_eq!(fit.model, PinchModel::Spherical);
    }

    #[test]
    fn growing_series_has_no_pinch() {
        let t = [0.0, 0.1, 0.2, 0.3];
        let w = [1.0, 1.1, 1.2, 1.3];
        assert!(matches!(estimate_pinch_time(&t, &w), Err(Error::NoPinch)));
        assert!(matches!(estimate_pinch_time(&t[..3], &w[..3]), Err(Error::Argument(_))));
    }
}
