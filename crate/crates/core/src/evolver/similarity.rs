use super::stepper::FlowFrame;
use crate::error::{Error, Result};
use crate::profile::point_segment_distance;
use crate::real::Real;

/// Largest Hausdorff distance between the contour of each frame and the
/// initial contour scaled by `sqrt((T - t) / T)` about the origin.
pub fn check_self_similarity<T: Real>(frames: &[FlowFrame<T>], extinction: T) -> Result<T> {
    let Some(first) = frames.first() else {
        return Err(Error::Argument("no frames".into()));
    };
    if frames.len() == 1 {
        return Ok(T::zero());
    }
    let last = frames[frames.len() - 1].time;
    if !(extinction > last) {
        return Err(Error::Argument(format!("extinction time {extinction} is not after the last frame at {last}")));
    }
    let t0 = first.time;
    let base = first.contour.segments();
    let mut worst = T::zero();
    for f in &frames[1..] {
        let lambda = ((extinction - f.time) / (extinction - t0)).sqrt();
        let scaled: Vec<_> = base
            .iter()
            .map(|&(p, q)| ((p.0 * lambda, p.1 * lambda), (q.0 * lambda, q.1 * lambda)))
            .collect();
        let cur = f.contour.segments();
        worst = worst.max(hausdorff(&scaled, &cur));
    }
    Ok(worst)
}

type Seg<T> = ((T, T), (T, T));

pub(crate) fn hausdorff<T: Real>(a: &[Seg<T>], b: &[Seg<T>]) -> T {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { T::zero() } else { T::infinity() };
    }
    directed(a, b).max(directed(b, a))
}

fn directed<T: Real>(from: &[Seg<T>], to: &[Seg<T>]) -> T {
    let mut worst = T::zero();
    for &(p, _) in from {
        let d = to.iter().fold(T::infinity(), |m, &(a, b)| m.min(point_segment_distance(p, a, b)));
        worst = worst.max(d);
    }
    worst
}
