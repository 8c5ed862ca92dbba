use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::step::{descend, mix, project_chain};
use super::trace::average;
use super::{sample_component, AgentSpec, RunTrace, Snapshot, StepsizeSchedule, TraceRecord, Verdict};
use crate::error::{ensure_dim, Error, Result};
use crate::geometry::{IntersectionSet, Point, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use crate::network::TopologySchedule;

/// Iterates with a larger norm abort the run.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialPoints {
    /// Independent standard normal coordinates from each agent's own stream.
    StandardNormal,
    Zeros,
    Given(Vec<Point>),
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub agents: Vec<AgentSpec>,
    pub schedule: TopologySchedule,
    pub stepsize: StepsizeSchedule,
    pub batch_size: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Metrics are recorded at every `cadence`-th iteration and at the last one.
    pub cadence: usize,
    /// Threads used for the per-agent updates. Results do not depend on it.
    pub workers: usize,
    pub init: InitialPoints,
    /// Measure `dist(v_i(k), X)` at every record (one intersection projection per agent).
    pub track_infeasibility: bool,
    pub projection_tol: f64,
    pub projection_max_sweeps: usize,
    /// Dump all iterates every this many iterations.
    pub dump_cadence: Option<usize>,
}

impl RunConfig {
    pub fn new(agents: Vec<AgentSpec>, schedule: TopologySchedule) -> Self {
        RunConfig {
            agents,
            schedule,
            stepsize: StepsizeSchedule::default(),
            batch_size: 1,
            max_iters: 20_000,
            seed: 0,
            cadence: 1,
            workers: 1,
            init: InitialPoints::StandardNormal,
            track_infeasibility: true,
            projection_tol: DEFAULT_TOL,
            projection_max_sweeps: DEFAULT_MAX_SWEEPS,
            dump_cadence: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.agents.first().map_or(0, AgentSpec::dim)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.agents.len();
        if m == 0 {
            return Err(Error::InvalidConfig("no agents".into()));
        }
        if self.schedule.agents() != m {
            return Err(Error::InvalidConfig(format!(
                "topology has {} agents, config has {m}",
                self.schedule.agents()
            )));
        }
        let d = self.dim();
        for a in &self.agents {
            ensure_dim(d, a.dim())?;
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be >= 1".into()));
        }
        if self.cadence == 0 || self.workers == 0 || self.dump_cadence == Some(0) {
            return Err(Error::InvalidConfig("cadence and worker count must be >= 1".into()));
        }
        self.stepsize.validate()?;
        if let InitialPoints::Given(points) = &self.init {
            ensure_dim(m, points.len())?;
            for p in points {
                ensure_dim(d, p.dim())?;
            }
        }
        Ok(())
    }

    /// Intersection of every agent's components, i.e. the global feasible set.
    pub fn feasible_set(&self) -> Result<IntersectionSet> {
        IntersectionSet::new(
            self.agents
                .iter()
                .flat_map(|a| a.components().iter().cloned())
                .collect(),
        )
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.stepsize.is_diminishing_square_summable() {
            out.push(format!(
                "stepsize {} is not diminishing and square-summable; convergence is not guaranteed",
                self.stepsize
            ));
        }
        if self
            .agents
            .iter()
            .any(|a| a.components().iter().any(|c| !c.is_polyhedral()))
        {
            out.push("regularity of the feasible set is unchecked for non-polyhedral components".into());
        }
        out
    }
}

const STREAM_INIT: u64 = 0;
const STREAM_SAMPLING: u64 = 1;

/// Independent stream for `(agent, role)` under the master seed.
fn agent_stream(seed: u64, agent: usize, role: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(agent as u64 * 2 + role);
    rng
}

/// Synchronous simulation of all agents. Each call to [`Simulation::step`]
/// performs one iteration `k -> k + 1` behind a full barrier.
pub struct Simulation<'c> {
    config: &'c RunConfig,
    feasible: IntersectionSet,
    iterates: Vec<Point>,
    samplers: Vec<ChaCha8Rng>,
    k: usize,
    pool: rayon::ThreadPool,
    gradient_bound: f64,
}

impl<'c> Simulation<'c> {
    pub fn new(config: &'c RunConfig) -> Result<Self> {
        config.validate()?;
        let d = config.dim();
        let m = config.agents.len();
        let iterates = match &config.init {
            InitialPoints::StandardNormal => (0..m)
                .map(|i| {
                    let mut rng = agent_stream(config.seed, i, STREAM_INIT);
                    Point::dense((0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
                })
                .collect(),
            InitialPoints::Zeros => vec![Point::zeros(d); m],
            InitialPoints::Given(points) => points
                .iter()
                .map(|p| Point::dense(p.to_dense()))
                .collect(),
        };
        let samplers = (0..m)
            .map(|i| agent_stream(config.seed, i, STREAM_SAMPLING))
            .collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        Ok(Simulation {
            config,
            feasible: config.feasible_set()?,
            iterates,
            samplers,
            k: 0,
            pool,
            gradient_bound: 0.0,
        })
    }

    pub fn config(&self) -> &RunConfig {
        self.config
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    pub fn iterates(&self) -> &[Point] {
        &self.iterates
    }

    pub fn gradient_bound_estimate(&self) -> f64 {
        self.gradient_bound
    }

    /// `v(k) = W(k) x(k)`.
    pub fn mixed(&self) -> Result<Vec<Point>> {
        mix(&self.iterates, self.config.schedule.weights_at(self.k))
    }

    /// One full iteration: mix, gradient step, `b` sampled projections per agent.
    pub fn step(&mut self) -> Result<()> {
        self.advance(None)
    }

    /// [`Simulation::step`] reporting every `(agent, r, psi^r)` of the projection chain.
    /// The observer runs on the calling thread after the parallel update.
    pub fn step_observed(&mut self, mut observer: impl FnMut(usize, usize, &Point)) -> Result<()> {
        self.advance(Some(&mut observer))
    }

    fn advance(&mut self, mut observer: Option<&mut dyn FnMut(usize, usize, &Point)>) -> Result<()> {
        let config = self.config;
        let v = self.mixed()?;
        let alpha = config.stepsize.at(self.k);
        let b = config.batch_size;
        let record_chain = observer.is_some();

        let updates: Vec<Result<(Point, f64, Vec<Point>)>> = self.pool.install(|| {
            config
                .agents
                .par_iter()
                .zip(v.par_iter())
                .zip(self.samplers.par_iter_mut())
                .map(|((agent, vi), rng)| {
                    let omegas: Vec<usize> = (0..b).map(|_| sample_component(agent, rng)).collect();
                    let (psi, grad_norm) = descend(agent, vi, alpha)?;
                    let mut chain = Vec::new();
                    let x = project_chain(agent, psi, &omegas, |_, p| {
                        if record_chain {
                            chain.push(p.clone());
                        }
                    })?;
                    Ok((x, grad_norm, chain))
                })
                .collect()
        });

        let mut next = Vec::with_capacity(updates.len());
        for (agent, update) in updates.into_iter().enumerate() {
            let (x, grad_norm, chain) = update?;
            if let Some(obs) = observer.as_mut() {
                for (r, p) in chain.iter().enumerate() {
                    obs(agent, r, p);
                }
            }
            let norm = x.norm();
            if !(norm <= DIVERGENCE_NORM) {
                return Err(Error::Diverged {
                    agent,
                    iteration: self.k + 1,
                    norm,
                });
            }
            self.gradient_bound = self.gradient_bound.max(grad_norm);
            next.push(x);
        }
        self.iterates = next;
        self.k += 1;
        Ok(())
    }

    /// Metrics at the current iteration.
    pub fn record(&self) -> Result<TraceRecord> {
        let config = self.config;
        let v = self.mixed()?;
        let xbar = average(&self.iterates)?;
        let vbar = average(&v)?;

        let total = |x: &Point| -> Result<f64> {
            config
                .agents
                .iter()
                .try_fold(0.0, |acc, a| Ok(acc + a.objective().value(x)?))
        };
        let objective = total(&xbar)?;
        let mut min_agent_objective = f64::INFINITY;
        let mut max_agent_objective = f64::NEG_INFINITY;
        for x in &self.iterates {
            let f = total(x)?;
            min_agent_objective = min_agent_objective.min(f);
            max_agent_objective = max_agent_objective.max(f);
        }
        let mut max_disagreement = 0.0_f64;
        for vi in &v {
            max_disagreement = max_disagreement.max(vi.distance(&vbar)?);
        }

        let max_infeasibility = if config.track_infeasibility {
            let tol = config.projection_tol;
            let sweeps = config.projection_max_sweeps;
            let feasible = &self.feasible;
            let dists: Vec<Result<f64>> = self
                .pool
                .install(|| v.par_iter().map(|vi| feasible.distance(vi, tol, sweeps)).collect());
            let mut worst = 0.0_f64;
            for d in dists {
                worst = worst.max(d?);
            }
            Some(worst)
        } else {
            None
        };

        Ok(TraceRecord {
            k: self.k,
            objective,
            max_disagreement,
            max_infeasibility,
            stepsize: config.stepsize.at(self.k),
            min_agent_objective,
            max_agent_objective,
            accuracy: None,
        })
    }
}

/// Hook invoked at each record with the current iterates and the record so
/// far; it may fill in accuracy and returns `true` to stop the run.
pub trait RecordHook {
    fn on_record(&mut self, iterates: &[Point], record: &mut TraceRecord, history: &[TraceRecord]) -> Result<bool>;
}

impl<F> RecordHook for F
where
    F: FnMut(&[Point], &mut TraceRecord, &[TraceRecord]) -> Result<bool>,
{
    fn on_record(&mut self, iterates: &[Point], record: &mut TraceRecord, history: &[TraceRecord]) -> Result<bool> {
        self(iterates, record, history)
    }
}

/// Runs `config` for at most `max_iters` iterations, recording metrics at the
/// configured cadence and consulting `hook` after each record.
pub fn drive(config: &RunConfig, mut hook: impl RecordHook) -> Result<RunTrace> {
    let mut sim = Simulation::new(config)?;
    let mut trace = RunTrace {
        records: Vec::new(),
        verdict: Verdict::IterationCapped,
        gradient_bound_estimate: 0.0,
        snapshots: Vec::new(),
        warnings: config.warnings(),
        final_iterates: Vec::new(),
    };
    loop {
        let k = sim.iteration();
        if let Some(every) = config.dump_cadence {
            if k % every == 0 || k == config.max_iters {
                trace.snapshots.push(Snapshot {
                    k,
                    iterates: sim.iterates().to_vec(),
                });
            }
        }
        if k % config.cadence == 0 || k == config.max_iters {
            let mut record = sim.record()?;
            let stop = hook.on_record(sim.iterates(), &mut record, &trace.records)?;
            trace.records.push(record);
            if stop {
                trace.verdict = Verdict::Converged;
                break;
            }
        }
        if k == config.max_iters {
            break;
        }
        match sim.step() {
            Ok(()) => {}
            Err(Error::Diverged { agent, iteration, norm }) => {
                trace.verdict = Verdict::Diverged { agent, iteration };
                trace.warnings.push(format!(
                    "agent {agent} diverged at iteration {iteration} (|x| = {norm:e})"
                ));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    trace.gradient_bound_estimate = sim.gradient_bound_estimate();
    trace.final_iterates = sim.iterates().to_vec();
    Ok(trace)
}

/// Runs every iteration up to `config.max_iters`.
pub fn run(config: &RunConfig) -> Result<RunTrace> {
    drive(config, |_: &[Point], _: &mut TraceRecord, _: &[TraceRecord]| Ok(false))
}
