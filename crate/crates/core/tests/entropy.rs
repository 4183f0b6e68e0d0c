use std::f64::consts::{E, FRAC_PI_2, PI};

use neckflow::entropy::{density, entropy, DensityQuery};
use neckflow::harness::{shrinker_family, family_member};
use neckflow::profile::ProfileCurve;
use neckflow::shrinker::catalogue;

fn sphere(radius: f64, n: usize) -> ProfileCurve<f64> {
    let pts: Vec<(f64, f64)> = (0..=n)
        .map(|k| {
            let a = -FRAC_PI_2 + PI * k as f64 / n as f64;
            (radius * a.cos(), radius * a.sin())
        })
        .collect();
    ProfileCurve::from_positions(&pts, false)
}

// the round sphere is symmetric about its center, so only |x0| matters:
// 2R/d exp(-(R^2 + d^2) / 4t) sinh(R d / 2t)
fn sphere_density(radius: f64, a: f64, z0: f64, t0: f64) -> f64 {
    let d = a.hypot(z0);
    if d < 1e-12 {
        return radius * radius / t0 * (-radius * radius / (4.0 * t0)).exp();
    }
    2.0 * radius / d * (-(radius * radius + d * d) / (4.0 * t0)).exp() * (radius * d / (2.0 * t0)).sinh()
}

fn torus() -> ProfileCurve<f64> {
    catalogue(1e-10f64).unwrap().into_iter().find(|e| e.name == "torus").unwrap().profile
}

#[test]
fn sphere_density_closed_form() {
    let s = sphere(2.0, 4000);
    for (a, z0, t0) in [(0.0, 0.0, 1.0), (0.0, 0.7, 0.5), (0.9, 0.0, 1.0), (1.3, -0.4, 2.0), (0.3, 0.2, 0.2)] {
        let got = density(&[s.clone()], DensityQuery::new(a, z0, t0)).unwrap();
        let want = sphere_density(2.0, a, z0, t0);
        assert!((got - want).abs() < 1e-5, "({a},{z0},{t0}): {got} vs {want}");
    }
}

#[test]
fn axial_center_is_the_plain_kernel() {
    let t = torus();
    let pts = t.positions();
    for (z0, t0) in [(0.0, 1.0), (0.3, 0.4), (-0.5, 3.0)] {
        // trapezoid rule on the same chord subdivision, without the Bessel factor
        let f = |p: (f64, f64)| p.0 * (-(p.0 * p.0 + (p.1 - z0).powi(2)) / (4.0 * t0)).exp();
        let max_ds = 0.25 * f64::sqrt(t0);
        let n = pts.len();
        let mut sum = 0.0;
        for k in 0..n {
            let (p, q) = (pts[k], pts[(k + 1) % n]);
            let len = (q.0 - p.0).hypot(q.1 - p.1);
            let m = ((len / max_ds).ceil() as usize).max(1);
            for i in 0..m {
                let (u, v) = (i as f64 / m as f64, (i + 1) as f64 / m as f64);
                let x = (p.0 + u * (q.0 - p.0), p.1 + u * (q.1 - p.1));
                let y = (p.0 + v * (q.0 - p.0), p.1 + v * (q.1 - p.1));
                sum += 0.5 * (f(x) + f(y)) * len / m as f64;
            }
        }
        let want = sum / (2.0 * t0);
        let got = density(&[t.clone()], DensityQuery::new(0.0, z0, t0)).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn small_scale_density_tends_to_one() {
    let s = sphere(2.0, 20_000);
    let d2 = density(&[s.clone()], DensityQuery::new(2.0, 0.0, 1e-2)).unwrap();
    let d3 = density(&[s], DensityQuery::new(2.0, 0.0, 1e-3)).unwrap();
    // the defect is linear in t0: extrapolate to t0 = 0
    let limit = d3 - (d2 - d3) / 9.0;
    assert!((d3 - 1.0).abs() < 2e-3, "{d3}");
    assert!((limit - 1.0).abs() < 1e-3, "{limit}");
}

#[test]
fn sphere_entropy_and_invariance() {
    let s = sphere(2.0, 2000);
    let e = entropy(&[s.clone()]).unwrap();
    assert!((e.value - 4.0 / E).abs() < 1e-3, "{}", e.value);
    let q = e.argmax;
    assert!(q.a.abs() < 0.05 && q.z0.abs() < 0.05 && (q.t0 - 1.0).abs() < 0.05, "{q:?}");
    assert!(e.trace.iter().all(|t| t.value <= e.value));
    for lambda in [0.5, 2.0] {
        let v = entropy(&[s.scaled(lambda)]).unwrap().value;
        assert!((v - e.value).abs() < 1e-3, "lambda {lambda}: {v}");
    }
    let v = entropy(&[s.translated_z(0.7)]).unwrap().value;
    assert!((v - e.value).abs() < 1e-3, "{v}");
}

#[test]
fn torus_shrinker_entropy() {
    let t = torus();
    let e = entropy(&[t.clone()]).unwrap();
    assert!((e.value - 1.85).abs() < 0.03, "{}", e.value);
    assert!(e.value < 2.0);
    assert!(e.value >= density(&[t], DensityQuery::new(0.0, 0.0, 1.0)).unwrap() - 1e-12);
}

#[test]
fn inward_offset_does_not_raise_entropy() {
    let fam = shrinker_family(0.1, 9).unwrap();
    let f = catalogue(1e-10f64).unwrap().into_iter().find(|e| e.name == "torus").unwrap().gaussian_area;
    let inner = family_member(&fam, 0.0).unwrap().offset_curve(0.01).unwrap();
    let v = entropy(&[inner]).unwrap().value;
    assert!(v < f + 1e-3, "{v} vs {f}");
}
