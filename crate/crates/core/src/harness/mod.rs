//! Experiment orchestration: classification of family members by which
//! generator terminates, bisection for the critical parameter, and the
//! validation suites.

mod bisect;
mod checks;
mod classify;
mod config;
mod render;
mod scenarios;

pub use bisect::{bisect, classify_many, sweep, BisectionReport, BracketStep, SweepReport};
pub use checks::{
    avoidance_check, contour_distance, contour_profiles, entropy_along_run, fixture_zoo_check, genus_timeline_check, ledger_report, probe_around,
    run_h1_monotonicity, termination_semicontinuity_probe, AvoidanceReport, EntropyTrace, GenusTimeline, ProbeRow,
    FixtureRow, LedgerReport, SemicontinuityReport,
};
pub use classify::{classify_flow, classify_run, ledger_for, simulate, Classification, Label, RunArtifacts};
pub use config::{family_member, shrinker_family, HarnessConfig};
pub use render::{frame_svg, profile_svg, write_frames_csv};
pub use scenarios::{run_scenario, scripted_scenarios, Descent, Scenario, ScenarioReport, Shape};
