use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use neckflow::entropy::entropy;
use neckflow::field::{FamilySpec, SurfaceSpec};
use neckflow::harness::{
    bisect, classify_run, fixture_zoo_check, frame_svg, genus_timeline_check, ledger_report, profile_svg, run_h1_monotonicity, run_scenario,
    scripted_scenarios, shrinker_family, simulate, sweep, write_frames_csv, HarnessConfig,
};
use neckflow::profile::{read_profiles_csv, write_profiles_csv};
use neckflow::shrinker::{catalogue, write_catalogue_csv};
use neckflow::{Error, Result};

#[derive(Parser)]
#[command(name = "neckflow", version, about = "Axisymmetric mean curvature flow experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON config file with `harness`, `surface`, `family` and `bisect` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Grid spacing override.
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Voxel lattice size override for homology checks.
    #[arg(long, global = true)]
    voxel_n: Option<usize>,
    /// Worker threads for family runs (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one surface and write frames, ledger and renderings.
    Simulate(SimulateArgs),
    /// Bisect a family for the parameter where the terminating generator switches.
    Bisect(BisectArgs),
    /// Shoot the shrinker catalogue.
    Shrinker {
        /// Bisection tolerance of the torus search.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Entropy of the surface generated by a profile CSV (`r,z` with optional `curve`).
    Entropy { profile: PathBuf },
    /// Fixture zoo, scripted descent scenarios and, optionally, invariants on evolved runs.
    Validate {
        /// Voxels per axis for the fixture zoo.
        #[arg(long, default_value_t = 24)]
        zoo_n: usize,
        /// Also evolve a sphere and a thin torus and check their invariants.
        #[arg(long)]
        runs: bool,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Surface spec JSON file (overrides the config `surface`).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["spec", "torus"])]
    sphere: Option<f64>,
    /// Core and tube radius.
    #[arg(long, num_args = 2, value_names = ["R", "RHO"], conflicts_with = "spec")]
    torus: Option<Vec<f64>>,
    /// Write an SVG for every n-th frame (0 disables).
    #[arg(long, default_value_t = 10)]
    svg_every: usize,
    /// Voxelize every frame and check that H1 of the complement never grows.
    #[arg(long)]
    homology: bool,
}

#[derive(Args)]
struct BisectArgs {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_interior: Option<usize>,
    /// Normal offset of the default shrinker family.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Also classify the family's evenly spaced samples.
    #[arg(long)]
    sweep: bool,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    harness: HarnessConfig,
    surface: Option<SurfaceSpec<f64>>,
    family: Option<FamilySpec<f64>>,
    bisect: BisectSection,
}

#[derive(Deserialize)]
#[serde(default)]
struct BisectSection {
    tolerance: f64,
    max_interior: usize,
}

impl Default for BisectSection {
    fn default() -> Self {
        Self { tolerance: 1.0 / 64.0, max_interior: 6 }
    }
}

#[derive(Serialize)]
struct Verdict {
    name: String,
    passed: bool,
}

struct Outcome {
    verdicts: Vec<Verdict>,
}

impl Outcome {
    fn new() -> Self {
        Self { verdicts: Vec::new() }
    }

    fn check(&mut self, name: &str, passed: bool) {
        println!("{} {name}", if passed { "PASS" } else { "FAIL" });
        self.verdicts.push(Verdict { name: name.to_string(), passed });
    }

    fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

fn load_config(g: &Global) -> Result<ConfigFile> {
    let mut cfg: ConfigFile = match &g.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => ConfigFile::default(),
    };
    let h = &mut cfg.harness;
    if let Some(s) = g.seed {
        h.seed = s;
    }
    if let Some(v) = g.h {
        h.h = v;
    }
    if let Some(n) = g.voxel_n {
        h.voxel_n = n;
    }
    if let Some(w) = g.workers {
        h.workers = w;
    }
    h.validate()?;
    Ok(cfg)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn run_simulate(cfg: &ConfigFile, out: &Path, a: &SimulateArgs) -> Result<Outcome> {
    let spec = if let Some(r) = a.sphere {
        SurfaceSpec::Sphere { center_z: 0.0, radius: r }
    } else if let Some(t) = &a.torus {
        SurfaceSpec::Torus { core_radius: t[0], tube_radius: t[1], center_z: 0.0 }
    } else if let Some(p) = &a.spec {
        serde_json::from_str(&fs::read_to_string(p)?)?
    } else {
        cfg.surface.clone().ok_or_else(|| Error::Config("no surface: pass --sphere, --torus, --spec or a config `surface`".into()))?
    };
    spec.validate()?;
    let art = simulate(&spec, &cfg.harness, a.homology)?;
    write_frames_csv(art.frames(), fs::File::create(out.join("frames.csv"))?)?;
    art.ledger.write_csv(fs::File::create(out.join("ledger.csv"))?)?;
    write_json(&out.join("ledger.json"), &ledger_report(&art))?;
    if a.svg_every > 0 {
        let dir = out.join("svg");
        fs::create_dir_all(&dir)?;
        let grid = cfg.harness.grid_for(&spec)?;
        for (k, f) in art.frames().iter().enumerate().filter(|(k, _)| k % a.svg_every == 0) {
            fs::write(dir.join(format!("frame_{k:04}.svg")), frame_svg(f, &grid))?;
        }
    }
    let class = classify_run(&art, None);
    let genus = genus_timeline_check(&art);
    let h1 = if a.homology { Some(run_h1_monotonicity(art.frames(), cfg.harness.voxel_n)?) } else { None };
    println!("stop {:?} after {} frames; label {:?}", art.run.stop, art.frames().len(), class.label);
    let mut o = Outcome::new();
    o.check("genus_timeline", genus.passed);
    o.check("termination_event", class.event_consistent);
    if let Some(r) = &h1 {
        o.check("h1_monotonicity", r.passed());
    }
    write_json(
        &out.join("report.json"),
        &serde_json::json!({
            "seed": cfg.harness.seed,
            "spec": spec,
            "stop": art.run.stop,
            "classification": class,
            "genus_timeline": genus,
            "h1_monotonicity": h1,
            "verdicts": o.verdicts,
        }),
    )?;
    Ok(o)
}

fn run_bisect(cfg: &ConfigFile, out: &Path, a: &BisectArgs) -> Result<Outcome> {
    let family = match &cfg.family {
        Some(f) => f.clone(),
        None => shrinker_family(a.delta, 9)?,
    };
    let tol = a.tol.unwrap_or(cfg.bisect.tolerance);
    let max_interior = a.max_interior.unwrap_or(cfg.bisect.max_interior);
    let mut o = Outcome::new();
    if a.sweep {
        let sw = sweep(&family, &cfg.harness)?;
        write_json(&out.join("sweep.json"), &sw)?;
        o.check("sweep_exactly_one", sw.exactly_one);
        o.check("sweep_monotone", sw.monotone);
        o.check("sweep_endpoints", sw.endpoints_ok);
        o.check("sweep_events", sw.events_consistent);
    }
    let rep = bisect(&family, tol, max_interior, &cfg.harness)?;
    write_json(&out.join("bisection.json"), &rep)?;
    println!("bracket [{}, {}] width {} after {} interior runs", rep.bracket.0, rep.bracket.1, rep.width, rep.interior_runs);
    for step in &rep.trend {
        println!("  [{:.6}, {:.6}] gap {}", step.lo, step.hi, step.gap.map_or("-".into(), |g| format!("{g:.4}")));
    }
    o.check("bisection_width", rep.success);
    o.check("bisection_monotone", rep.monotone);
    Ok(o)
}

fn run_shrinker(out: &Path, tol: f64) -> Result<Outcome> {
    let cat = catalogue(tol)?;
    write_catalogue_csv(&cat, fs::File::create(out.join("catalogue.csv"))?)?;
    write_json(&out.join("catalogue.json"), &cat)?;
    let dir = out.join("profiles");
    fs::create_dir_all(&dir)?;
    for e in &cat {
        let curves = std::slice::from_ref(&e.profile);
        write_profiles_csv(curves, fs::File::create(dir.join(format!("{}.csv", e.name)))?)?;
        fs::write(dir.join(format!("{}.svg", e.name)), profile_svg(curves))?;
        println!("{:<9} r_start {:.12} residual {:.3e} F {:.6}", e.name, e.r_start, e.closure_residual, e.gaussian_area);
    }
    let get = |n: &str| cat.iter().find(|e| e.name == n);
    let mut o = Outcome::new();
    o.check("sphere_closes", get("sphere").is_some_and(|e| e.closure_residual < 1e-5));
    o.check("cylinder_stationary", get("cylinder").is_some_and(|e| e.closure_residual < 1e-6));
    o.check("torus_below_two", get("torus").is_some_and(|e| e.gaussian_area < 2.0));
    Ok(o)
}

fn run_entropy(out: &Path, profile: &Path) -> Result<Outcome> {
    let curves = read_profiles_csv::<f64, _>(fs::File::open(profile)?)?;
    let res = entropy(&curves)?;
    write_json(&out.join("entropy.json"), &res)?;
    println!("entropy {:.6} at a={:.4} z0={:.4} t0={:.4}", res.value, res.argmax.a, res.argmax.z0, res.argmax.t0);
    let mut o = Outcome::new();
    o.check("dominates_trace", res.trace.iter().all(|s| s.value <= res.value));
    Ok(o)
}

fn run_validate(cfg: &ConfigFile, out: &Path, zoo_n: usize, runs: bool) -> Result<Outcome> {
    let mut o = Outcome::new();
    let zoo = fixture_zoo_check(zoo_n, &out.join("fixtures"))?;
    for row in &zoo {
        o.check(&format!("fixture_{}", row.name), row.passed());
    }
    let mut scenarios = Vec::new();
    for sc in scripted_scenarios() {
        let rep = run_scenario(&sc)?;
        o.check(&format!("scenario_{}", rep.name), rep.agrees);
        scenarios.push(rep);
    }
    let mut run_reports = Vec::new();
    if runs {
        let specs = [
            ("sphere", SurfaceSpec::Sphere { center_z: 0.0, radius: 1.0 }),
            ("thin_torus", SurfaceSpec::Torus { core_radius: 2.0, tube_radius: 0.2, center_z: 0.0 }),
        ];
        for (name, spec) in specs {
            let art = simulate(&spec, &cfg.harness, true)?;
            let genus = genus_timeline_check(&art);
            let h1 = run_h1_monotonicity(art.frames(), cfg.harness.voxel_n)?;
            o.check(&format!("{name}_genus_timeline"), genus.passed);
            o.check(&format!("{name}_h1_monotonicity"), h1.passed());
            run_reports.push(serde_json::json!({ "name": name, "genus_timeline": genus, "h1_monotonicity": h1 }));
        }
    }
    write_json(
        &out.join("validate.json"),
        &serde_json::json!({ "seed": cfg.harness.seed, "fixtures": zoo, "scenarios": scenarios, "runs": run_reports, "verdicts": o.verdicts }),
    )?;
    Ok(o)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = load_config(&cli.global)?;
    let out = &cli.global.out;
    fs::create_dir_all(out)?;
    match &cli.command {
        Command::Simulate(a) => run_simulate(&cfg, out, a),
        Command::Bisect(a) => run_bisect(&cfg, out, a),
        Command::Shrinker { tol } => run_shrinker(out, *tol),
        Command::Entropy { profile } => run_entropy(out, profile),
        Command::Validate { zoo_n, runs } => run_validate(&cfg, out, *zoo_n, *runs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) if o.passed() => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
