//! Experiment orchestration: stopping rules, reference solvers, configs,
//! convergence-condition audits and the SVM iteration-count experiment.

pub mod audit;
mod config;
mod experiment;
mod oracle;
mod problems;
mod stopping;

pub use audit::{audit, AuditItem, AuditReport};
pub use config::{
    AlgorithmSection, ConfigFile, Experiment, NetworkSection, Overrides, ProblemSection, SvmContext,
};
pub use experiment::{format_table, Calibration, SvmExperiment, Table2Cell, TargetRun};
pub use oracle::{
    crp_oracle, execute, projected_gradient_oracle, CrpResult, Evaluator, Execution, OracleOptions,
    OracleSolution, RunSettings,
};
pub use problems::QuadraticProblemSpec;
pub use stopping::{check_tail, evaluate_stopping, StopDecision, StoppingRule, DEFAULT_RELATIVE_THETA};

pub use crate::engine::{RunTrace, TraceRecord, Verdict};
