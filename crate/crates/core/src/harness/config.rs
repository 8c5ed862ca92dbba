//! Experiment configuration files.
//!
//! A config is TOML with a top-level `seed` and three sections. Every key
//! except `problem.kind` and `problem.agents` has a default:
//!
//! ```toml
//! seed = 0                      # master seed: init, sampling, generated problems and graphs
//!
//! [problem]
//! kind = "quadratic"            # or "svm"
//! agents = 6
//! dim = 5                       # quadratic: variables
//! min_components = 2            # quadratic: components per agent
//! max_components = 6
//! # dataset = "bundled"         # svm: path (relative to the config) or "bundled"
//! # c = 1.0                     # svm
//! # bias = true                 # svm
//!
//! [network]
//! topology = "clique"           # clique | ring | expanderD | periodic
//! # schedule = "edges.txt"      # periodic: one edge set per line, "k: i->j, ..."
//! # q = 1                       # periodic: connectivity window
//! weights = "metropolis"        # or "uniform"
//!
//! [algorithm]
//! stepsize = "harmonic:1"       # harmonic:A0 | constant:ALPHA | power:A0:P
//! batch = 1
//! max_iters = 20000
//! cadence = 1
//! workers = 1
//! init = "normal"               # or "zeros"
//! track_infeasibility = true
//! # dump_cadence = 100          # per-agent iterate dump every N iterations
//! stopping = "max-iters"        # max-iters | relative[:THETA] | accuracy:T
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::oracle::RunSettings;
use super::problems::QuadraticProblemSpec;
use super::stopping::StoppingRule;
use crate::engine::{InitialPoints, RunConfig, StepsizeSchedule};
use crate::error::{Error, Result};
use crate::network::{parse_schedule, Topology, TopologySchedule, WeightMatrix};
use crate::svm::{bundled_blobs, parse_dataset, Dataset, SvmProblem};

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub seed: u64,
    pub problem: ProblemSection,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub algorithm: AlgorithmSection,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSection {
    Quadratic {
        agents: usize,
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "default_min_components")]
        min_components: usize,
        #[serde(default = "default_max_components")]
        max_components: usize,
    },
    Svm {
        agents: usize,
        #[serde(default = "default_dataset")]
        dataset: String,
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_true")]
        bias: bool,
    },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default = "default_topology")]
    pub topology: String,
    pub schedule: Option<PathBuf>,
    pub q: Option<usize>,
    #[serde(default = "default_weights")]
    pub weights: String,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    #[serde(default = "default_stepsize")]
    pub stepsize: String,
    #[serde(default = "default_one")]
    pub batch: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_one")]
    pub cadence: usize,
    #[serde(default = "default_one")]
    pub workers: usize,
    #[serde(default = "default_init")]
    pub init: String,
    #[serde(default = "default_true")]
    pub track_infeasibility: bool,
    pub dump_cadence: Option<usize>,
    #[serde(default = "default_stopping")]
    pub stopping: String,
}

fn default_dim() -> usize {
    5
}
fn default_min_components() -> usize {
    2
}
fn default_max_components() -> usize {
    6
}
fn default_dataset() -> String {
    "bundled".into()
}
fn default_c() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_topology() -> String {
    "clique".into()
}
fn default_weights() -> String {
    "metropolis".into()
}
fn default_stepsize() -> String {
    "harmonic:1".into()
}
fn default_one() -> usize {
    1
}
fn default_max_iters() -> usize {
    20_000
}
fn default_init() -> String {
    "normal".into()
}
fn default_stopping() -> String {
    "max-iters".into()
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection {
            topology: default_topology(),
            schedule: None,
            q: None,
            weights: default_weights(),
        }
    }
}

impl Default for AlgorithmSection {
    fn default() -> Self {
        AlgorithmSection {
            stepsize: default_stepsize(),
            batch: 1,
            max_iters: default_max_iters(),
            cadence: 1,
            workers: 1,
            init: default_init(),
            track_infeasibility: true,
            dump_cadence: None,
            stopping: default_stopping(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub agents: Option<usize>,
    pub batch: Option<usize>,
    pub topology: Option<String>,
    pub stepsize: Option<String>,
    pub max_iters: Option<usize>,
    pub workers: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(m) = o.agents {
            match &mut self.problem {
                ProblemSection::Quadratic { agents, .. } | ProblemSection::Svm { agents, .. } => *agents = m,
            }
        }
        if let Some(b) = o.batch {
            self.algorithm.batch = b;
        }
        if let Some(t) = &o.topology {
            self.network.topology = t.clone();
        }
        if let Some(s) = &o.stepsize {
            self.algorithm.stepsize = s.clone();
        }
        if let Some(k) = o.max_iters {
            self.algorithm.max_iters = k;
        }
        if let Some(w) = o.workers {
            self.algorithm.workers = w;
        }
    }
}

/// SVM problem together with its held-out test set.
#[derive(Clone, Debug)]
pub struct SvmContext {
    pub problem: SvmProblem,
    pub test: Dataset,
}

/// A fully built experiment. The network is not checked for connectivity
/// here; see [`super::audit`].
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: RunConfig,
    pub rule: StoppingRule,
    pub svm: Option<SvmContext>,
}

impl Experiment {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut file = ConfigFile::parse(&text)?;
        file.apply(overrides);
        Self::build(&file, path.parent().unwrap_or(Path::new(".")))
    }

    /// Relative paths in `file` are resolved against `base`.
    pub fn build(file: &ConfigFile, base: &Path) -> Result<Self> {
        let alg = &file.algorithm;
        let stepsize: StepsizeSchedule = alg.stepsize.parse()?;
        let rule: StoppingRule = match alg.stopping.as_str() {
            "max-iters" => StoppingRule::MaxIters(alg.max_iters),
            s => s.parse()?,
        };
        let init = match alg.init.as_str() {
            "normal" => InitialPoints::StandardNormal,
            "zeros" => InitialPoints::Zeros,
            other => return Err(Error::InvalidConfig(format!("unknown init {other:?}"))),
        };
        let settings = RunSettings {
            stepsize,
            batch_size: alg.batch,
            max_iters: alg.max_iters,
            seed: file.seed,
            cadence: alg.cadence,
            workers: alg.workers,
            init,
            track_infeasibility: alg.track_infeasibility,
            dump_cadence: alg.dump_cadence,
        };

        let (agents, svm) = match &file.problem {
            ProblemSection::Quadratic {
                agents,
                dim,
                min_components,
                max_components,
            } => {
                let mut spec = QuadraticProblemSpec::new(*agents, *dim, file.seed);
                spec.min_components = *min_components;
                spec.max_components = *max_components;
                (spec.generate()?, None)
            }
            ProblemSection::Svm {
                agents,
                dataset,
                c,
                bias,
            } => {
                let ds = if dataset == "bundled" {
                    bundled_blobs()
                } else {
                    parse_dataset(&base.join(dataset))?
                };
                let (train, test) = ds.split_80_20(file.seed)?;
                let dim = train.feature_dim().max(test.feature_dim());
                let problem = crate::svm::build_problem(&train.with_feature_dim(dim)?, *c, *agents, *bias)?;
                let test = test.with_feature_dim(dim)?;
                (problem.agents().to_vec(), Some(SvmContext { problem, test }))
            }
        };
        if rule.needs_accuracy() && svm.is_none() {
            return Err(Error::InvalidConfig(
                "the accuracy stopping rule needs an svm problem".into(),
            ));
        }

        let schedule = build_schedule(&file.network, agents.len(), file.seed, base)?;
        Ok(Experiment {
            config: settings.apply(agents, schedule),
            rule,
            svm,
        })
    }
}

fn build_schedule(net: &NetworkSection, agents: usize, seed: u64, base: &Path) -> Result<TopologySchedule> {
    let topology = if net.topology == "periodic" {
        let path = net
            .schedule
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("periodic topology needs network.schedule".into()))?;
        let path = base.join(path);
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read schedule {}: {e}", path.display())))?;
        Topology::PeriodicSequence {
            edge_sets: parse_schedule(&text, agents)?,
            q: net.q.unwrap_or(1),
        }
    } else {
        if net.schedule.is_some() || net.q.is_some() {
            return Err(Error::InvalidConfig(
                "network.schedule and network.q only apply to the periodic topology".into(),
            ));
        }
        net.topology.parse()?
    };
    let schedule = TopologySchedule::new_unchecked(agents, topology, seed)?;
    match net.weights.as_str() {
        "metropolis" => Ok(schedule),
        "uniform" => {
            let w = vec![WeightMatrix::uniform(agents); schedule.period()];
            schedule.with_weights(w)
        }
        other => Err(Error::InvalidConfig(format!("unknown weights {other:?}"))),
    }
}
