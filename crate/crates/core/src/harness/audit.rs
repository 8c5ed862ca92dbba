use std::fmt;

use crate::engine::{RunConfig, StepsizeSchedule};
use crate::network::TopologySchedule;

/// One checked condition.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditItem {
    pub clause: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub items: Vec<AuditItem>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditItem> {
        self.items.iter().filter(|i| !i.passed)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            let mark = if item.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark}  {}: {}", item.clause, item.detail)?;
        }
        Ok(())
    }
}

pub const CLAUSE_CONNECTIVITY: &str = "network: union of edge sets over every window of q steps is strongly connected";
pub const CLAUSE_TOPOLOGY: &str = "weights: nonnegative and zero off the edge set";
pub const CLAUSE_ROWS: &str = "weights: rows sum to one";
pub const CLAUSE_LOWER_BOUND: &str = "weights: edge weights bounded below by eta in (0,1]";
pub const CLAUSE_COLUMNS: &str = "weights: columns sum to one";
pub const CLAUSE_STEP_SUM: &str = "stepsize: sum of alpha_k diverges";
pub const CLAUSE_STEP_SQUARES: &str = "stepsize: sum of alpha_k^2 is finite";
pub const CLAUSE_SAMPLING: &str = "sampling: every component has positive probability";

/// Audits the network over `horizon` steps, every weight matrix of the
/// schedule's period, the stepsize conditions and the sampling distributions.
pub fn audit(config: &RunConfig, horizon: usize) -> AuditReport {
    let mut items = network_items(&config.schedule, horizon);
    items.extend(stepsize_items(&config.stepsize));
    let bad_sampling: Vec<usize> = config
        .agents
        .iter()
        .enumerate()
        .filter(|(_, a)| a.probabilities().iter().any(|p| !(*p > 0.0)))
        .map(|(i, _)| i)
        .collect();
    items.push(AuditItem {
        clause: CLAUSE_SAMPLING,
        passed: bad_sampling.is_empty(),
        detail: if bad_sampling.is_empty() {
            format!("{} agents", config.agents.len())
        } else {
            format!("agents {bad_sampling:?}")
        },
    });
    AuditReport { items }
}

pub fn network_items(schedule: &TopologySchedule, horizon: usize) -> Vec<AuditItem> {
    let q = schedule.q();
    let horizon = horizon.max(schedule.period() + q);
    let connected = schedule.check_q_connectivity(q, horizon);
    let mut items = vec![AuditItem {
        clause: CLAUSE_CONNECTIVITY,
        passed: matches!(connected, Ok(true)),
        detail: match connected {
            Ok(_) => format!("{} with q = {q}, checked over {horizon} steps", schedule.topology()),
            Err(e) => e.to_string(),
        },
    }];

    let audits: Vec<_> = schedule
        .weights()
        .iter()
        .zip(schedule.edge_sets())
        .map(|(w, e)| w.audit(e))
        .collect();
    let clause = |name: &'static str, ok: &dyn Fn(&crate::network::WeightAudit) -> bool| {
        let bad: Vec<usize> = audits
            .iter()
            .enumerate()
            .filter(|(_, a)| !ok(a))
            .map(|(k, _)| k)
            .collect();
        AuditItem {
            clause: name,
            passed: bad.is_empty(),
            detail: if bad.is_empty() {
                format!("{} matrices, eta = {}", audits.len(), schedule.eta())
            } else {
                format!("violated at steps {bad:?} of the period")
            },
        }
    };
    items.push(clause(CLAUSE_TOPOLOGY, &|a| a.respects_topology));
    items.push(clause(CLAUSE_ROWS, &|a| a.rows_sum_to_one));
    items.push(clause(CLAUSE_LOWER_BOUND, &|a| a.edge_weights_bounded_below));
    items.push(clause(CLAUSE_COLUMNS, &|a| a.columns_sum_to_one));
    items
}

pub fn stepsize_items(stepsize: &StepsizeSchedule) -> Vec<AuditItem> {
    let (sum_diverges, squares_finite) = match *stepsize {
        StepsizeSchedule::Harmonic { .. } => (true, true),
        StepsizeSchedule::Constant { .. } => (true, false),
        StepsizeSchedule::PowerLaw { p, .. } => (p <= 1.0, p > 0.5),
    };
    vec![
        AuditItem {
            clause: CLAUSE_STEP_SUM,
            passed: sum_diverges,
            detail: stepsize.to_string(),
        },
        AuditItem {
            clause: CLAUSE_STEP_SQUARES,
            passed: squares_finite,
            detail: stepsize.to_string(),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepsize_clauses() {
        let ok = |s: &str| -> Vec<bool> {
            stepsize_items(&s.parse().unwrap())
                .iter()
                .map(|i| i.passed)
                .collect()
        };
        assert_eq!(ok("harmonic:1"), vec![true, true]);
        assert_eq!(ok("constant:0.1"), vec![true, false]);
        assert_eq!(ok("power:1:0.75"), vec![true, true]);
        assert_eq!(ok("power:1:0.5"), vec![true, false]);
        assert_eq!(ok("power:1:2"), vec![false, true]);
    }
}
