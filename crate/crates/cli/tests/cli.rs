use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("neckflow-cli-{name}-{}", std::process::id()));
    std::fs::remove_dir_all(&d).ok();
    d
}

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neckflow")).arg("--out").arg(out).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn shrinker_profile_feeds_entropy() {
    let dir = scratch("shrinker");
    let o = run(&dir, &["shrinker"]);
    assert!(o.status.success(), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().all(|l| !l.starts_with("FAIL")));
    for f in ["catalogue.csv", "catalogue.json", "profiles/sphere.csv", "profiles/torus.svg"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.join("catalogue.csv")).unwrap();
    assert!(csv.starts_with("name,r_start,closure_residual,F"));

    let sphere = dir.join("profiles/sphere.csv");
    let o = run(&dir.join("entropy"), &["entropy", sphere.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("entropy/entropy.json")).unwrap()).unwrap();
    let v = rep["value"].as_f64().expect("entropy value");
    assert!((v - 4.0 / std::f64::consts::E).abs() < 1e-3, "{v}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_passes() {
    let dir = scratch("validate");
    let o = run(&dir, &["validate"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    assert!(dir.join("validate.json").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn coarse_simulation_writes_its_outputs() {
    let dir = scratch("simulate");
    let o = run(&dir, &["--h", "0.03125", "simulate", "--torus", "2", "0.2"]);
    assert!(o.status.success(), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    for f in ["frames.csv", "ledger.csv", "ledger.json", "report.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    assert!(std::fs::read_dir(dir.join("svg")).unwrap().count() > 0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_input_exits_with_two() {
    let dir = scratch("bad");
    let missing = dir.join("nope.csv");
    let o = run(&dir, &["entropy", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&dir, &["--h", "-1", "simulate", "--sphere", "1"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
