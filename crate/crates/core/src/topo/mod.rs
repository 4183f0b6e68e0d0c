//! Zero-contour extraction, region decomposition, the generator ledger and
//! neck pinch fits.

pub(crate) mod components;
mod contour;
mod decompose;
mod ledger;
mod pinch;

pub use contour::{extract_contour, Contour, Polyline};
pub use decompose::{decompose, InComponent, RegionDecomposition, SurfaceKind, TopologySummary};
pub use ledger::{
    update_ledger, GeneratorStatus, HomologyLedger, LedgerEntry, LedgerFrame, LedgerSummary, TerminationKind,
    SIGNIFICANT_NODES,
};
pub use pinch::{estimate_pinch_time, PinchFit, PinchModel, CYLINDRICAL_RATE, SPHERICAL_RATE};
