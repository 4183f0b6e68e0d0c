use neckflow::field::SurfaceSpec;
use neckflow::harness::{
    avoidance_check, classify_run, genus_timeline_check, ledger_report, run_scenario, scripted_scenarios, simulate, HarnessConfig, Label,
};

fn coarse() -> HarnessConfig {
    HarnessConfig { h: 1.0 / 32.0, ..Default::default() }
}

#[test]
fn config_round_trips_through_json() {
    let c = HarnessConfig { h: 0.01, seed: 42, workers: 1, ..Default::default() };
    let back: HarnessConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn scripted_scenarios_agree_with_the_oracle() {
    for sc in scripted_scenarios() {
        let r = run_scenario(&sc).unwrap();
        assert!(r.agrees, "{}: {r:?}", sc.name);
    }
}

#[test]
fn thin_torus_pinches_inward() {
    let spec = SurfaceSpec::Torus { core_radius: 2.0, tube_radius: 0.2, center_z: 0.0 };
    let art = simulate(&spec, &coarse(), false).unwrap();
    let c = classify_run(&art, None);
    assert_eq!(c.label, Label::A, "{c:?}");
    assert!(c.is_clean() && c.event_consistent);
    assert!(genus_timeline_check(&art).passed);
    let rep = ledger_report(&art);
    assert_eq!(rep.summary.t_a0, c.t_in);
}

#[test]
fn nested_spheres_keep_apart() {
    let c = coarse();
    let inner = SurfaceSpec::Sphere { center_z: 0.0, radius: 1.0 };
    let outer = SurfaceSpec::Sphere { center_z: 0.0, radius: 2.0 };
    let rep = avoidance_check(&inner, &outer, &c).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert!(rep.times.len() > 10);
    for (&t, &g) in rep.times.iter().zip(&rep.gaps) {
        let want = (4.0 - 4.0 * t).sqrt() - (1.0 - 4.0 * t).sqrt();
        assert!((g - want).abs() < 3.0 * c.h, "t={t}: {g} vs {want}");
    }
    let crossing = SurfaceSpec::Sphere { center_z: 0.5, radius: 1.0 };
    assert!(avoidance_check(&inner, &crossing, &c).is_err());
}
