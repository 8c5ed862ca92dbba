use std::fmt::Write as _;

use super::oracle::{crp_oracle, execute, Execution, RunSettings};
use super::stopping::{StoppingRule, DEFAULT_RELATIVE_THETA};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::{Topology, TopologySchedule};
use crate::svm::{accuracy, build_problem, Dataset, SvmProblem, DEFAULT_C};

/// Iteration-count experiment on a train/test split: calibrate a target
/// accuracy with the centralized method, then count iterations until every
/// agent of a network run reaches it.
#[derive(Clone, Debug)]
pub struct SvmExperiment {
    train: Dataset,
    test: Dataset,
    pub c: f64,
    pub bias: bool,
    /// Stepsize, iteration cap and initialization shared by every run.
    /// The seed is supplied per run.
    pub settings: RunSettings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub t_acc: f64,
    /// Iteration at which the relative-objective rule fired, if it did.
    pub stopped_at: Option<usize>,
    pub objective: f64,
    pub point: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetRun {
    /// First iteration at which every agent reached the target; `None` if the cap was hit.
    pub iterations: Option<usize>,
    pub execution: Execution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table2Cell {
    pub agents: usize,
    pub topology: Topology,
    pub batch: usize,
    pub seed: u64,
    pub iterations: Option<usize>,
}

impl SvmExperiment {
    /// Splits `ds` 80/20 with `split_seed`.
    pub fn new(ds: &Dataset, split_seed: u64) -> Result<Self> {
        let (train, test) = ds.split_80_20(split_seed)?;
        Self::from_split(train, test)
    }

    pub fn from_split(train: Dataset, test: Dataset) -> Result<Self> {
        let dim = train.feature_dim().max(test.feature_dim());
        Ok(SvmExperiment {
            train: train.with_feature_dim(dim)?,
            test: test.with_feature_dim(dim)?,
            c: DEFAULT_C,
            bias: true,
            settings: RunSettings {
                track_infeasibility: false,
                ..RunSettings::default()
            },
        })
    }

    pub fn train(&self) -> &Dataset {
        &self.train
    }

    pub fn test(&self) -> &Dataset {
        &self.test
    }

    pub fn problem(&self, agents: usize) -> Result<SvmProblem> {
        build_problem(&self.train, self.c, agents, self.bias)
    }

    fn evaluator<'a>(&'a self, problem: &'a SvmProblem) -> impl Fn(&Point) -> Result<f64> + Sync + 'a {
        move |x: &Point| accuracy(&problem.weights(x)?, &self.test, self.bias)
    }

    /// Centralized run with `b = 1` until the relative objective change drops
    /// below 0.001; the test accuracy of its final iterate is the target.
    pub fn calibrate(&self, seed: u64) -> Result<Calibration> {
        let problem = self.problem(1)?;
        let settings = RunSettings {
            batch_size: 1,
            seed,
            cadence: 1,
            ..self.settings.clone()
        };
        let rule = StoppingRule::RelativeObjective {
            theta: DEFAULT_RELATIVE_THETA,
        };
        let agent = problem.agents()[0].clone();
        let res = crp_oracle(agent, &settings, &rule, None)?;
        let t_acc = accuracy(&problem.weights(&res.point)?, &self.test, self.bias)?;
        if t_acc <= 0.0 {
            return Err(Error::InvalidArgument(
                "centralized run reached zero test accuracy; no usable target".into(),
            ));
        }
        Ok(Calibration {
            t_acc,
            stopped_at: res.execution.stop.map(|s| s.k),
            objective: problem.objective(&res.point)?,
            point: res.point,
        })
    }

    /// Network run until every agent's test accuracy is at least `t_acc`.
    pub fn iterations_to_target(
        &self,
        agents: usize,
        topology: &Topology,
        batch: usize,
        seed: u64,
        t_acc: f64,
    ) -> Result<TargetRun> {
        let problem = self.problem(agents)?;
        let schedule = TopologySchedule::new(agents, topology.clone(), seed)?;
        let settings = RunSettings {
            batch_size: batch,
            seed,
            cadence: 1,
            ..self.settings.clone()
        };
        let config = settings.apply(problem.agents().to_vec(), schedule);
        let eval = self.evaluator(&problem);
        let execution = execute(&config, &StoppingRule::TargetAccuracy { t_acc }, Some(&eval))?;
        Ok(TargetRun {
            iterations: execution.stop.map(|s| s.k),
            execution,
        })
    }

    /// Every combination of agents x topology x batch x seed. Two-agent
    /// runs only use the first topology, since every connected 2-node graph
    /// is the clique.
    pub fn table(
        &self,
        t_acc: f64,
        agents: &[usize],
        topologies: &[Topology],
        batches: &[usize],
        seeds: &[u64],
    ) -> Result<Vec<Table2Cell>> {
        let mut cells = Vec::new();
        for &m in agents {
            for (ti, topology) in topologies.iter().enumerate() {
                if m <= 2 && ti > 0 {
                    continue;
                }
                for &b in batches {
                    for &seed in seeds {
                        let run = self.iterations_to_target(m, topology, b, seed, t_acc)?;
                        cells.push(Table2Cell {
                            agents: m,
                            topology: topology.clone(),
                            batch: b,
                            seed,
                            iterations: run.iterations,
                        });
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// Fixed-width report, one row per (topology, agents, batch) and one column per seed.
/// `-` marks runs that hit the iteration cap.
pub fn format_table(t_acc: f64, cells: &[Table2Cell]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "t_acc = {t_acc}");
    let _ = writeln!(out, "{:<12} {:>6} {:>6}  iterations", "topology", "m", "b");
    let mut rows: Vec<(String, usize, usize)> = Vec::new();
    for c in cells {
        let key = (c.topology.to_string(), c.agents, c.batch);
        if !rows.contains(&key) {
            rows.push(key);
        }
    }
    for (topology, m, b) in rows {
        let iters: Vec<String> = cells
            .iter()
            .filter(|c| c.topology.to_string() == topology && c.agents == m && c.batch == b)
            .map(|c| c.iterations.map_or_else(|| "-".to_string(), |k| k.to_string()))
            .collect();
        let _ = writeln!(out, "{topology:<12} {m:>6} {b:>6}  {}", iters.join(" "));
    }
    out
}
