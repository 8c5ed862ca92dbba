use std::fmt::Write as _;
use std::ops::Range;

use super::Dataset;
use crate::engine::AgentSpec;
use crate::error::{Error, Result};
use crate::geometry::{Component, IntersectionSet, Point};
use crate::objectives::{Objective, SvmLocal};

/// Soft-margin linear SVM split across agents.
///
/// Variables are `x = (y, xi)`: the weight block `y` (features plus an
/// optional bias coordinate) followed by one slack per training example.
/// Sample `j` contributes the two-halfspace component
/// `{b_j <y, a_j> >= 1 - xi_j, xi_j >= 0}` to the agent that owns it.
#[derive(Clone, Debug)]
pub struct SvmProblem {
    feature_dim: usize,
    bias: bool,
    samples: usize,
    c: f64,
    partition: Vec<Range<usize>>,
    agents: Vec<AgentSpec>,
}

pub const DEFAULT_C: f64 = 1.0;

/// Splits `0..n` into `m` consecutive blocks of `floor(n/m)`, the last agent taking the remainder.
pub fn partition(n: usize, m: usize) -> Result<Vec<Range<usize>>> {
    if m == 0 || n < m {
        return Err(Error::InvalidArgument(format!(
            "cannot split {n} samples across {m} agents"
        )));
    }
    let base = n / m;
    Ok((0..m)
        .map(|i| {
            let start = i * base;
            let end = if i + 1 == m { n } else { start + base };
            start..end
        })
        .collect())
}

pub fn build_problem(ds: &Dataset, c: f64, agents: usize, bias: bool) -> Result<SvmProblem> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("C must be > 0, got {c}")));
    }
    let n = ds.len();
    let parts = partition(n, agents)?;
    let feature_dim = ds.feature_dim();
    let weight_dim = feature_dim + usize::from(bias);
    let dim = weight_dim + n;

    let component = |j: usize| -> Result<Component> {
        let e = &ds.examples()[j];
        // -b_j <y, a_j> - xi_j <= -1
        let mut entries: Vec<(usize, f64)> = e.features.entries().map(|(i, v)| (i, -e.label * v)).collect();
        if bias {
            entries.push((feature_dim, -e.label));
        }
        entries.push((weight_dim + j, -1.0));
        Component::halfspace_with_nonneg(Point::sparse(dim, entries)?, -1.0, weight_dim + j)
    };

    let agent_specs = parts
        .iter()
        .map(|range| {
            let objective = Objective::svm_local(SvmLocal::new(weight_dim, n, range.clone(), c, agents)?);
            let components = range.clone().map(component).collect::<Result<Vec<_>>>()?;
            AgentSpec::new(objective, components)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SvmProblem {
        feature_dim,
        bias,
        samples: n,
        c,
        partition: parts,
        agents: agent_specs,
    })
}

impl SvmProblem {
    pub fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    pub fn into_agents(self) -> Vec<AgentSpec> {
        self.agents
    }

    pub fn partition(&self) -> &[Range<usize>] {
        &self.partition
    }

    pub fn partition_sizes(&self) -> Vec<usize> {
        self.partition.iter().map(|r| r.len()).collect()
    }

    pub fn owner(&self, sample: usize) -> Option<usize> {
        self.partition.iter().position(|r| r.contains(&sample))
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn weight_dim(&self) -> usize {
        self.feature_dim + usize::from(self.bias)
    }

    pub fn dim(&self) -> usize {
        self.weight_dim() + self.samples
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn bias(&self) -> bool {
        self.bias
    }

    /// `1/2 |y|^2 + C sum_j xi_j`.
    pub fn objective(&self, x: &Point) -> Result<f64> {
        self.agents
            .iter()
            .try_fold(0.0, |acc, a| Ok(acc + a.objective().value(x)?))
    }

    pub fn feasible_set(&self) -> Result<IntersectionSet> {
        IntersectionSet::new(
            self.agents
                .iter()
                .flat_map(|a| a.components().iter().cloned())
                .collect(),
        )
    }

    pub fn weights<'a>(&self, x: &'a Point) -> Result<Point> {
        crate::error::ensure_dim(self.dim(), x.dim())?;
        Ok(Point::dense((0..self.weight_dim()).map(|i| x.get(i)).collect()))
    }

    /// Test accuracy of the weight block of `x` on `ds`.
    pub fn accuracy(&self, x: &Point, ds: &Dataset) -> Result<f64> {
        let y = self.weights(x)?;
        let ds = if ds.feature_dim() == self.feature_dim {
            std::borrow::Cow::Borrowed(ds)
        } else {
            std::borrow::Cow::Owned(ds.with_feature_dim(self.feature_dim)?)
        };
        accuracy(&y, &ds, self.bias)
    }

    /// Key/value summary for logs.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "features = {}", self.feature_dim);
        let _ = writeln!(s, "bias = {}", self.bias);
        let _ = writeln!(s, "dim = {}", self.dim());
        let _ = writeln!(s, "c = {}", self.c);
        let _ = writeln!(s, "agents = {}", self.agents.len());
        let sizes: Vec<String> = self.partition_sizes().iter().map(usize::to_string).collect();
        let _ = writeln!(s, "partition = [{}]", sizes.join(", "));
        s
    }
}

/// Fraction of examples with `sign(<y, a_j>) = b_j`. A zero score counts as wrong.
pub fn accuracy(y: &Point, ds: &Dataset, bias: bool) -> Result<f64> {
    let expected = ds.feature_dim() + usize::from(bias);
    crate::error::ensure_dim(expected, y.dim())?;
    if ds.is_empty() {
        return Err(Error::InvalidArgument("accuracy of an empty dataset".into()));
    }
    let offset = if bias { y.get(ds.feature_dim()) } else { 0.0 };
    let mut correct = 0usize;
    for e in ds.examples() {
        let score: f64 = e.features.entries().map(|(i, v)| v * y.get(i)).sum::<f64>() + offset;
        if score * e.label > 0.0 {
            correct += 1;
        }
    }
    Ok(correct as f64 / ds.len() as f64)
}
