use super::stopping::{check_tail, StopDecision, StoppingRule};
use crate::engine::{
    drive, AgentSpec, InitialPoints, RunConfig, RunTrace, StepsizeSchedule, TraceRecord, Verdict,
};
use crate::error::{Error, Result};
use crate::geometry::{IntersectionSet, Point};
use crate::network::{Topology, TopologySchedule};
use crate::objectives::Objective;

/// Scores one agent's iterate, e.g. test accuracy of its weight block.
pub type Evaluator<'a> = &'a (dyn Fn(&Point) -> Result<f64> + Sync);

/// Run parameters that do not depend on the agents or the network.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSettings {
    pub stepsize: StepsizeSchedule,
    pub batch_size: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub cadence: usize,
    pub workers: usize,
    pub init: InitialPoints,
    pub track_infeasibility: bool,
    pub dump_cadence: Option<usize>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            stepsize: StepsizeSchedule::default(),
            batch_size: 1,
            max_iters: 20_000,
            seed: 0,
            cadence: 1,
            workers: 1,
            init: InitialPoints::StandardNormal,
            track_infeasibility: true,
            dump_cadence: None,
        }
    }
}

impl RunSettings {
    pub fn apply(&self, agents: Vec<AgentSpec>, schedule: TopologySchedule) -> RunConfig {
        let mut c = RunConfig::new(agents, schedule);
        c.stepsize = self.stepsize;
        c.batch_size = self.batch_size;
        c.max_iters = self.max_iters;
        c.seed = self.seed;
        c.cadence = self.cadence;
        c.workers = self.workers;
        c.init = self.init.clone();
        c.track_infeasibility = self.track_infeasibility;
        c.dump_cadence = self.dump_cadence;
        c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Execution {
    pub trace: RunTrace,
    /// Where the stopping rule fired, if it did before `max_iters`.
    pub stop: Option<StopDecision>,
}

/// Runs `config` until `rule` fires or `config.max_iters` is reached. With an
/// evaluator, every record carries the per-agent scores.
pub fn execute(config: &RunConfig, rule: &StoppingRule, evaluator: Option<Evaluator>) -> Result<Execution> {
    rule.validate()?;
    if rule.needs_accuracy() && evaluator.is_none() {
        return Err(Error::InvalidArgument(format!("{rule} needs an accuracy evaluator")));
    }
    let mut stop = None;
    let trace = drive(
        config,
        |iterates: &[Point], record: &mut TraceRecord, history: &[TraceRecord]| {
            if let Some(eval) = evaluator {
                record.accuracy = Some(iterates.iter().map(eval).collect::<Result<Vec<_>>>()?);
            }
            match check_tail(rule, history, record) {
                Some(k) => {
                    stop = Some(StopDecision {
                        k,
                        record: history.len(),
                    });
                    Ok(true)
                }
                None => Ok(false),
            }
        },
    )?;
    let mut trace = trace;
    if matches!(rule, StoppingRule::MaxIters(_)) && trace.verdict == Verdict::Converged {
        // hitting an iteration budget is not convergence
        trace.verdict = Verdict::IterationCapped;
    }
    Ok(Execution { trace, stop })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrpResult {
    pub point: Point,
    pub execution: Execution,
}

/// Centralized random incremental projection: the engine with a single agent
/// holding every component.
pub fn crp_oracle(
    agent: AgentSpec,
    settings: &RunSettings,
    rule: &StoppingRule,
    evaluator: Option<Evaluator>,
) -> Result<CrpResult> {
    let schedule = TopologySchedule::new(1, Topology::Clique, settings.seed)?;
    let config = settings.apply(vec![agent], schedule);
    let execution = execute(&config, rule, evaluator)?;
    let point = execution
        .trace
        .final_iterates
        .first()
        .cloned()
        .ok_or_else(|| Error::InvalidConfig("run produced no iterate".into()))?;
    Ok(CrpResult { point, execution })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOptions {
    pub stepsize: StepsizeSchedule,
    pub max_iters: usize,
    /// Stop once the gradient-mapping norm is at most this.
    pub tol: f64,
    pub projection_tol: f64,
    pub projection_max_sweeps: usize,
}

impl OracleOptions {
    /// Constant step `1/L`.
    pub fn for_objective(objective: &Objective) -> Self {
        OracleOptions {
            stepsize: StepsizeSchedule::Constant {
                alpha: 1.0 / objective.lipschitz(),
            },
            max_iters: 100_000,
            tol: 1e-10,
            projection_tol: 1e-13,
            projection_max_sweeps: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub point: Point,
    pub value: f64,
    /// `|x - P(x - alpha grad f(x))| / alpha` at the returned point.
    pub gradient_mapping_norm: f64,
    pub iterations: usize,
    /// Gradient mapping below `tol` and every projection converged.
    pub converged: bool,
}

/// Centralized projected gradient with full intersection projections. The
/// answer is as good as the intersection projection, so use it only where
/// that projection is exact or run to high accuracy.
pub fn projected_gradient_oracle(
    objective: &Objective,
    set: &IntersectionSet,
    options: &OracleOptions,
) -> Result<OracleSolution> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("oracle needs at least one component".into()));
    }
    options.stepsize.validate()?;
    let (tol, sweeps) = (options.projection_tol, options.projection_max_sweeps);
    let start = set.project(&Point::zeros(objective.dim()), tol, sweeps)?;
    let mut projections_ok = start.converged;
    let mut x = Point::dense(start.point.into_dense());
    let mut mapping = f64::INFINITY;
    let mut iterations = 0;
    while iterations < options.max_iters {
        let alpha = options.stepsize.at(iterations);
        let mut y = x.clone();
        y.axpy(-alpha, &objective.gradient(&x)?)?;
        let p = set.project(&y, tol, sweeps)?;
        projections_ok &= p.converged;
        let next = Point::dense(p.point.into_dense());
        mapping = next.distance(&x)? / alpha;
        x = next;
        iterations += 1;
        if mapping <= options.tol {
            break;
        }
    }
    Ok(OracleSolution {
        value: objective.value(&x)?,
        point: x,
        gradient_mapping_norm: mapping,
        iterations,
        converged: projections_ok && mapping <= options.tol,
    })
}
