use nalgebra::DMatrix;

use super::EdgeSet;
use crate::error::{Error, Result};

/// Tolerance for row and column sums.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Mixing weights `W(k)` together with their smallest positive entry `eta`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    matrix: DMatrix<f64>,
    eta: f64,
}

/// Outcome of checking a weight matrix against the topology it is used with.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightAudit {
    /// Entries are nonnegative and vanish off the edge set.
    pub respects_topology: bool,
    pub rows_sum_to_one: bool,
    /// Every entry on an edge is at least `eta`.
    pub edge_weights_bounded_below: bool,
    pub columns_sum_to_one: bool,
    pub eta: f64,
}

impl WeightAudit {
    pub fn passed(&self) -> bool {
        self.respects_topology
            && self.rows_sum_to_one
            && self.edge_weights_bounded_below
            && self.columns_sum_to_one
    }

    /// Names of failed clauses.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.respects_topology {
            out.push("weights nonnegative and zero off the edge set");
        }
        if !self.rows_sum_to_one {
            out.push("rows sum to one");
        }
        if !self.edge_weights_bounded_below {
            out.push("edge weights bounded below by eta in (0,1]");
        }
        if !self.columns_sum_to_one {
            out.push("columns sum to one");
        }
        out
    }
}

impl WeightMatrix {
    /// Wraps an arbitrary square nonnegative matrix; `eta` becomes its smallest positive entry.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidWeights(format!(
                "matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidWeights("entries must be finite and >= 0".into()));
        }
        let eta = matrix
            .iter()
            .copied()
            .filter(|w| *w > 0.0)
            .fold(f64::INFINITY, f64::min);
        Ok(WeightMatrix { matrix, eta })
    }

    /// Uniform `1/m` weights on every pair.
    pub fn uniform(agents: usize) -> Self {
        WeightMatrix {
            matrix: DMatrix::from_element(agents, agents, 1.0 / agents as f64),
            eta: 1.0 / agents as f64,
        }
    }

    pub fn agents(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn audit(&self, edges: &EdgeSet) -> WeightAudit {
        let m = self.agents();
        let w = &self.matrix;
        let mut respects_topology = edges.agents() == m;
        let mut bounded = self.eta > 0.0 && self.eta <= 1.0;
        for i in 0..m {
            for j in 0..m {
                let on_edge = edges.contains(i, j);
                if w[(i, j)] < 0.0 || (!on_edge && w[(i, j)] != 0.0) {
                    respects_topology = false;
                }
                if on_edge && w[(i, j)] < self.eta {
                    bounded = false;
                }
            }
        }
        let rows_sum_to_one = (0..m).all(|i| (w.row(i).sum() - 1.0).abs() <= STOCHASTIC_TOL);
        let columns_sum_to_one = (0..m).all(|j| (w.column(j).sum() - 1.0).abs() <= STOCHASTIC_TOL);
        WeightAudit {
            respects_topology,
            rows_sum_to_one,
            edge_weights_bounded_below: bounded,
            columns_sum_to_one,
            eta: self.eta,
        }
    }
}

/// Metropolis weights on a symmetric, self-looped edge set:
/// `W_ij = 1/(1 + max(deg_i, deg_j))` on edges, diagonal takes the remainder.
pub fn metropolis_weights(edges: &EdgeSet) -> Result<WeightMatrix> {
    if !edges.is_symmetric() {
        return Err(Error::InvalidWeights(
            "Metropolis weights need a symmetric edge set".into(),
        ));
    }
    let m = edges.agents();
    let degree: Vec<usize> = (0..m)
        .map(|i| edges.in_neighbors(i).filter(|&j| j != i).count())
        .collect();
    let mut w = DMatrix::zeros(m, m);
    for (i, j) in edges.iter().filter(|(i, j)| i != j) {
        w[(i, j)] = 1.0 / (1 + degree[i].max(degree[j])) as f64;
    }
    for i in 0..m {
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    WeightMatrix::from_matrix(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_clique_is_uniform() {
        let w = metropolis_weights(&EdgeSet::complete(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((w.get(i, j) - 1.0 / 3.0).abs() < 1e-15);
            }
        }
        assert!(w.audit(&EdgeSet::complete(3)).passed());
    }

    #[test]
    fn isolated_node_and_two_path() {
        let w = metropolis_weights(&EdgeSet::isolated(1)).unwrap();
        assert_eq!(w.matrix().as_slice(), &[1.0]);

        let e = EdgeSet::from_undirected(2, [(0, 1)]).unwrap();
        let w = metropolis_weights(&e).unwrap();
        assert_eq!(w.matrix().as_slice(), &[0.5, 0.5, 0.5, 0.5]);
        assert_eq!(w.eta(), 0.5);
    }

    #[test]
    fn asymmetric_rejected() {
        let e = EdgeSet::from_directed(2, [(0, 1)]).unwrap();
        assert!(matches!(metropolis_weights(&e), Err(Error::InvalidWeights(_))));
    }

    #[test]
    fn audit_names_failing_clause() {
        let e = EdgeSet::from_undirected(3, [(0, 1), (1, 2)]).unwrap();
        // uniform weights put mass on the missing 0-2 edge
        let a = WeightMatrix::uniform(3).audit(&e);
        assert!(!a.respects_topology);
        assert!(a.rows_sum_to_one && a.columns_sum_to_one);

        // row-stochastic but not column-stochastic
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.2, 0.8]);
        let a = WeightMatrix::from_matrix(m).unwrap().audit(&EdgeSet::complete(2));
        assert_eq!(a.failures(), vec!["columns sum to one"]);
    }
}
