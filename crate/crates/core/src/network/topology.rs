use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{format_schedule, metropolis_weights, EdgeSet, WeightMatrix};
use crate::error::{Error, Result};

const MAX_PAIRING_ATTEMPTS: usize = 100_000;

/// How the edge sets `E(k)` are generated.
#[derive(Clone, Debug, PartialEq)]
pub enum Topology {
    Clique,
    /// Seeded random `degree`-regular simple connected graph, fixed over time.
    RegularExpander { degree: usize },
    /// Undirected ring.
    Ring,
    /// `E(k) = edge_sets[k mod len]`; `q` is the declared connectivity window.
    PeriodicSequence { edge_sets: Vec<EdgeSet>, q: usize },
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Clique => write!(f, "clique"),
            Topology::RegularExpander { degree } => write!(f, "expander{degree}"),
            Topology::Ring => write!(f, "ring"),
            Topology::PeriodicSequence { edge_sets, q } => {
                write!(f, "periodic(len={}, q={q})", edge_sets.len())
            }
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "clique" => Ok(Topology::Clique),
            "ring" => Ok(Topology::Ring),
            other => match other.strip_prefix("expander") {
                Some(d) => d
                    .parse()
                    .map(|degree| Topology::RegularExpander { degree })
                    .map_err(|_| Error::InvalidTopology(format!("bad expander degree in '{other}'"))),
                None => Err(Error::InvalidTopology(format!(
                    "unknown topology '{other}' (expected clique, ring or expanderD)"
                ))),
            },
        }
    }
}

/// A deterministic map from time to `(E(k), W(k))`.
///
/// All edge sets and their Metropolis weights are materialized at
/// construction, so lookups are pure and cheap.
#[derive(Clone, Debug)]
pub struct TopologySchedule {
    agents: usize,
    topology: Topology,
    seed: u64,
    edge_sets: Vec<EdgeSet>,
    weights: Vec<WeightMatrix>,
    q: usize,
}

impl TopologySchedule {
    pub fn new(agents: usize, topology: Topology, seed: u64) -> Result<Self> {
        let sched = Self::new_unchecked(agents, topology, seed)?;
        let q = sched.q;
        let horizon = (10 * q).max(sched.edge_sets.len() + q);
        if !sched.check_q_connectivity(q, horizon)? {
            return Err(Error::InvalidTopology(format!(
                "{} on {agents} agents is not {q}-connected",
                sched.topology
            )));
        }
        Ok(sched)
    }

    /// Like [`TopologySchedule::new`] but without the connectivity check, so
    /// that an audit can report on schedules that would be rejected.
    pub fn new_unchecked(agents: usize, topology: Topology, seed: u64) -> Result<Self> {
        if agents == 0 {
            return Err(Error::InvalidTopology("need at least one agent".into()));
        }
        let (edge_sets, q) = match &topology {
            Topology::Clique => (vec![EdgeSet::complete(agents)], 1),
            Topology::Ring => {
                let pairs: Vec<(usize, usize)> = if agents > 1 {
                    (0..agents).map(|i| (i, (i + 1) % agents)).collect()
                } else {
                    Vec::new()
                };
                (vec![EdgeSet::from_undirected(agents, pairs)?], 1)
            }
            Topology::RegularExpander { degree } => {
                (vec![random_regular_graph(agents, *degree, seed)?], 1)
            }
            Topology::PeriodicSequence { edge_sets, q } => {
                if edge_sets.is_empty() || *q == 0 {
                    return Err(Error::InvalidTopology(
                        "periodic schedule needs edge sets and q >= 1".into(),
                    ));
                }
                if let Some(e) = edge_sets.iter().find(|e| e.agents() != agents) {
                    return Err(Error::InvalidTopology(format!(
                        "edge set on {} agents in a {agents}-agent schedule",
                        e.agents()
                    )));
                }
                (edge_sets.clone(), *q)
            }
        };
        let weights = edge_sets
            .iter()
            .map(metropolis_weights)
            .collect::<Result<Vec<_>>>()?;
        Ok(TopologySchedule {
            agents,
            topology,
            seed,
            edge_sets,
            weights,
            q,
        })
    }

    /// Replaces the Metropolis weights, one matrix per step of the period.
    /// The weights are not audited here; see [`WeightMatrix::audit`].
    pub fn with_weights(mut self, weights: Vec<WeightMatrix>) -> Result<Self> {
        if weights.len() != self.edge_sets.len() {
            return Err(Error::InvalidWeights(format!(
                "need {} weight matrices, got {}",
                self.edge_sets.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.agents() != self.agents) {
            return Err(Error::InvalidWeights(format!(
                "{}x{} weights for {} agents",
                w.agents(),
                w.agents(),
                self.agents
            )));
        }
        self.weights = weights;
        Ok(self)
    }

    /// Edge sets of one period.
    pub fn edge_sets(&self) -> &[EdgeSet] {
        &self.edge_sets
    }

    /// Weights of one period.
    pub fn weights(&self) -> &[WeightMatrix] {
        &self.weights
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Connectivity window the schedule was validated with.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of distinct steps before the schedule repeats.
    pub fn period(&self) -> usize {
        self.edge_sets.len()
    }

    pub fn edges_at(&self, k: usize) -> &EdgeSet {
        &self.edge_sets[k % self.edge_sets.len()]
    }

    pub fn weights_at(&self, k: usize) -> &WeightMatrix {
        &self.weights[k % self.weights.len()]
    }

    /// Smallest positive weight over the whole schedule.
    pub fn eta(&self) -> f64 {
        self.weights
            .iter()
            .map(WeightMatrix::eta)
            .fold(f64::INFINITY, f64::min)
    }

    /// True iff for every `k` in `[0, horizon - q]` the union of `E(k..k+q)` is strongly connected.
    pub fn check_q_connectivity(&self, q: usize, horizon: usize) -> Result<bool> {
        if q == 0 || horizon < q {
            return Err(Error::InvalidArgument(format!(
                "need q >= 1 and horizon >= q, got q={q}, horizon={horizon}"
            )));
        }
        for k in 0..=(horizon - q) {
            let union = (k..k + q).fold(EdgeSet::isolated(self.agents), |acc, t| {
                acc.union(self.edges_at(t))
            });
            if !is_strongly_connected(&union) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Text dump of `E(0..horizon)`.
    pub fn to_text(&self, horizon: usize) -> String {
        format_schedule((0..horizon).map(|k| (k, self.edges_at(k))))
    }
}

pub fn is_strongly_connected(edges: &EdgeSet) -> bool {
    let mut g = DiGraph::<(), ()>::with_capacity(edges.agents(), edges.len());
    let nodes: Vec<_> = (0..edges.agents()).map(|_| g.add_node(())).collect();
    for (i, j) in edges.iter() {
        // information flows from j to i
        g.add_edge(nodes[j], nodes[i], ());
    }
    tarjan_scc(&g).len() <= 1
}

/// Pairing-model random regular graph, resampled until simple and connected.
pub fn random_regular_graph(agents: usize, degree: usize, seed: u64) -> Result<EdgeSet> {
    if degree >= agents || (agents * degree) % 2 != 0 {
        return Err(Error::InvalidTopology(format!(
            "no simple {degree}-regular graph on {agents} nodes"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..agents).flat_map(|i| std::iter::repeat_n(i, degree)).collect();
    'attempt: for _ in 0..MAX_PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut pairs = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || pairs.contains(&(a, b)) {
                continue 'attempt;
            }
            pairs.push((a, b));
        }
        let graph = EdgeSet::from_undirected(agents, pairs)?;
        if is_strongly_connected(&graph) {
            return Ok(graph);
        }
    }
    Err(Error::InvalidTopology(format!(
        "failed to sample a connected {degree}-regular graph on {agents} nodes"
    )))
}
