//! The distributed random projection iteration and its mini-batch variant.

mod agent;
mod simulation;
mod step;
mod stepsize;
mod trace;

pub use agent::{sample_component, AgentSpec};
pub use simulation::{drive, run, InitialPoints, RecordHook, RunConfig, Simulation, DIVERGENCE_NORM};
pub use step::{drp_step, minibatch_step, minibatch_step_traced, mix};
pub use stepsize::StepsizeSchedule;
pub use trace::{RunTrace, Snapshot, TraceRecord, Verdict, CSV_HEADER};
