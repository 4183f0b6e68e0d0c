//! Explicit time stepping of the axisymmetric level set flow and detection
//! of axis contacts and component extinction.

mod events;
mod rhs;
mod similarity;
mod stepper;

pub use events::{EventDetector, FlowEvent, FlowEventKind};
pub use rhs::curvature_rhs;
pub use similarity::check_self_similarity;
pub use stepper::{run_until_event, step, Evolver, EvolverConfig, FlowFrame, FlowObserver, FlowRun, FlowState, StopReason};

