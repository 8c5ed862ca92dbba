use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Directed edge set `E(k)` on agents `0..m`. An edge `(i, j)` means agent
/// `i` receives from agent `j`. Self-loops are always present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    agents: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl EdgeSet {
    /// Only the self-loops.
    pub fn isolated(agents: usize) -> Self {
        EdgeSet {
            agents,
            edges: (0..agents).map(|i| (i, i)).collect(),
        }
    }

    pub fn from_directed(agents: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = Self::isolated(agents);
        for (i, j) in pairs {
            set.insert(i, j)?;
        }
        Ok(set)
    }

    /// Each undirected pair becomes two directed edges.
    pub fn from_undirected(agents: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = Self::isolated(agents);
        for (i, j) in pairs {
            set.insert(i, j)?;
            set.insert(j, i)?;
        }
        Ok(set)
    }

    pub fn complete(agents: usize) -> Self {
        EdgeSet {
            agents,
            edges: (0..agents)
                .flat_map(|i| (0..agents).map(move |j| (i, j)))
                .collect(),
        }
    }

    fn insert(&mut self, i: usize, j: usize) -> Result<()> {
        for x in [i, j] {
            if x >= self.agents {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    len: self.agents,
                });
            }
        }
        self.edges.insert((i, j));
        Ok(())
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// `N_i`: agents that `i` receives from, including `i`.
    pub fn in_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((i, 0)..=(i, usize::MAX)).map(|&(_, j)| j)
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_neighbors(i).count()
    }

    pub fn out_degree(&self, j: usize) -> usize {
        self.edges.iter().filter(|&&(_, s)| s == j).count()
    }

    pub fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|&(i, j)| self.edges.contains(&(j, i)))
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet {
            agents: self.agents.max(other.agents),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }
}

/// One line per time step: `k: i->j, i->j, ...`, edges sorted.
pub fn format_schedule<'a>(edge_sets: impl IntoIterator<Item = (usize, &'a EdgeSet)>) -> String {
    let mut out = String::new();
    for (k, set) in edge_sets {
        let _ = write!(out, "{k}:");
        for (n, (i, j)) in set.iter().enumerate() {
            let sep = if n == 0 { " " } else { ", " };
            let _ = write!(out, "{sep}{i}->{j}");
        }
        out.push('\n');
    }
    out
}

/// Inverse of [`format_schedule`]. Lines must appear in order `0, 1, 2, ...`.
pub fn parse_schedule(text: &str, agents: usize) -> Result<Vec<EdgeSet>> {
    let err = |line: usize, message: String| Error::Parse {
        path: PathBuf::from("<schedule>"),
        line,
        message,
    };
    let mut sets = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (k, rest) = line
            .split_once(':')
            .ok_or_else(|| err(n + 1, "missing ':' after time index".into()))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|e| err(n + 1, format!("bad time index: {e}")))?;
        if k != sets.len() {
            return Err(err(n + 1, format!("expected time index {}, found {k}", sets.len())));
        }
        let mut pairs = Vec::new();
        for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (i, j) = tok
                .split_once("->")
                .ok_or_else(|| err(n + 1, format!("bad edge '{tok}'")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| err(n + 1, format!("bad agent id '{s}': {e}")))
            };
            pairs.push((parse(i)?, parse(j)?));
        }
        let set = EdgeSet::from_directed(agents, pairs).map_err(|e| err(n + 1, e.to_string()))?;
        sets.push(set);
    }
    Ok(sets)
}
