use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::{classify_flow, Classification, Label};
use super::config::HarnessConfig;
use crate::error::{Error, Result};
use crate::field::FamilySpec;

fn pool(config: &HarnessConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Setup(format!("worker pool: {e}")))
}

/// Classifies the given parameters concurrently; results come back in the
/// order of `params`.
pub fn classify_many(family: &FamilySpec<f64>, params: &[f64], config: &HarnessConfig) -> Result<Vec<Classification>> {
    pool(config)?.install(|| params.par_iter().map(|&s| classify_flow(family, s, config)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub samples: Vec<Classification>,
    /// Every clean run terminated exactly one generator.
    pub exactly_one: bool,
    /// No `A` label at a larger parameter than any `B` label.
    pub monotone: bool,
    pub endpoints_ok: bool,
    /// Clean terminations coincide with events of the matching kind.
    pub events_consistent: bool,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.exactly_one && self.monotone && self.endpoints_ok && self.events_consistent
    }
}

pub(crate) fn labels_monotone(samples: &[Classification]) -> bool {
    let last_a = samples.iter().filter(|c| c.label == Label::A).filter_map(|c| c.s).fold(f64::NEG_INFINITY, f64::max);
    let first_b = samples.iter().filter(|c| c.label == Label::B).filter_map(|c| c.s).fold(f64::INFINITY, f64::min);
    last_a < first_b
}

/// Classifies the family at its evenly spaced sample parameters.
pub fn sweep(family: &FamilySpec<f64>, config: &HarnessConfig) -> Result<SweepReport> {
    family.validate()?;
    let params = family.sample_parameters();
    let samples = classify_many(family, &params, config)?;
    let exactly_one = samples.iter().filter(|c| c.is_clean()).all(|c| c.ledger.a0.is_terminated() != c.ledger.b0.is_terminated());
    let endpoints_ok = samples.first().is_some_and(|c| c.label == Label::A) && samples.last().is_some_and(|c| c.label == Label::B);
    Ok(SweepReport {
        seed: config.seed,
        monotone: labels_monotone(&samples),
        exactly_one,
        endpoints_ok,
        events_consistent: samples.iter().all(|c| c.event_consistent),
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketStep {
    pub lo: f64,
    pub hi: f64,
    /// `|t_in(lo) - t_out(hi)|`: inward termination time at the `A` end
    /// against outward termination time at the `B` end.
    pub gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectionReport {
    pub seed: u64,
    pub tolerance: f64,
    /// Every classified parameter, sorted by `s`.
    pub samples: Vec<Classification>,
    pub bracket: (f64, f64),
    pub width: f64,
    /// Classified runs strictly inside `(0, 1)`.
    pub interior_runs: usize,
    /// Bracket and termination gap after each refinement, starting with the
    /// endpoints `0` and `1`.
    pub trend: Vec<BracketStep>,
    pub monotone: bool,
    pub success: bool,
    pub diagnostics: Vec<String>,
}

impl BisectionReport {
    pub fn endpoint_gap(&self) -> Option<f64> {
        self.trend.first().and_then(|s| s.gap)
    }

    pub fn final_gap(&self) -> Option<f64> {
        self.trend.last().and_then(|s| s.gap)
    }
}

fn gap(a: &Classification, b: &Classification) -> Option<f64> {
    Some((a.t_in? - b.t_out?).abs())
}

/// Bisection for the parameter where the label switches from `A` to `B`.
///
/// An indeterminate midpoint (after its refined retry) is kept in the report
/// and probed a quarter bracket to each side; the bracket then shrinks around
/// whichever probes are clean.
pub fn bisect(family: &FamilySpec<f64>, tol: f64, max_interior: usize, config: &HarnessConfig) -> Result<BisectionReport> {
    if !(tol > 0.0) {
        return Err(Error::Config("bisection tolerance must be positive".into()));
    }
    family.validate()?;
    let ends = classify_many(family, &[0.0, 1.0], config)?;
    let (mut lo_c, mut hi_c) = (ends[0].clone(), ends[1].clone());
    if lo_c.label != Label::A || hi_c.label != Label::B {
        return Err(Error::Setup(format!(
            "endpoints must classify A and B, got {:?} ({}) and {:?} ({})",
            lo_c.label,
            lo_c.cause.clone().unwrap_or_default(),
            hi_c.label,
            hi_c.cause.clone().unwrap_or_default()
        )));
    }
    let mut samples = ends;
    let mut diagnostics = Vec::new();
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut trend = vec![BracketStep { lo, hi, gap: gap(&lo_c, &hi_c) }];
    let mut interior = 0;
    while hi - lo > tol && interior < max_interior {
        let mid = 0.5 * (lo + hi);
        let c = classify_flow(family, mid, config)?;
        interior += 1;
        samples.push(c.clone());
        match c.label {
            Label::A => {
                lo = mid;
                lo_c = c;
            }
            Label::B => {
                hi = mid;
                hi_c = c;
            }
            Label::Indeterminate => {
                diagnostics.push(format!("s={mid}: indeterminate ({})", c.cause.clone().unwrap_or_default()));
                let q = 0.25 * (hi - lo);
                if interior + 2 > max_interior {
                    break;
                }
                let probes = classify_many(family, &[mid - q, mid + q], config)?;
                interior += 2;
                samples.extend(probes.iter().cloned());
                let (left, right) = (&probes[0], &probes[1]);
                if left.label == Label::B {
                    hi = mid - q;
                    hi_c = left.clone();
                } else if right.label == Label::A {
                    lo = mid + q;
                    lo_c = right.clone();
                } else {
                    if left.label == Label::A {
                        lo = mid - q;
                        lo_c = left.clone();
                    }
                    if right.label == Label::B {
                        hi = mid + q;
                        hi_c = right.clone();
                    }
                }
            }
        }
        trend.push(BracketStep { lo, hi, gap: gap(&lo_c, &hi_c) });
    }
    samples.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap_or(std::cmp::Ordering::Equal));
    let width = hi - lo;
    if width > tol {
        diagnostics.push(format!("bracket width {width} above tolerance {tol} after {interior} interior runs"));
    }
    Ok(BisectionReport {
        seed: config.seed,
        tolerance: tol,
        monotone: labels_monotone(&samples),
        success: width <= tol,
        samples,
        bracket: (lo, hi),
        width,
        interior_runs: interior,
        trend,
        diagnostics,
    })
}
