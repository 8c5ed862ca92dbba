use std::io::Write;

use crate::error::Result;
use crate::geometry::Point;

/// Metrics at one recorded iteration `k`, measured on `x(k)` and `v(k) = W(k) x(k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    /// `f(xbar(k))`, the total objective at the agents' average.
    pub objective: f64,
    /// `max_i |v_i(k) - vbar(k)|`
    pub max_disagreement: f64,
    /// `max_i dist(v_i(k), X)`, when measured.
    pub max_infeasibility: Option<f64>,
    pub stepsize: f64,
    /// `min_i f(x_i(k))`
    pub min_agent_objective: f64,
    /// `max_i f(x_i(k))`
    pub max_agent_objective: f64,
    /// Per-agent test accuracy, when an evaluator is attached.
    pub accuracy: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A stopping rule fired.
    Converged,
    IterationCapped,
    Diverged { agent: usize, iteration: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub k: usize,
    pub iterates: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub verdict: Verdict,
    /// Running max of `|grad f_i(v_i(k))|` over visited points.
    pub gradient_bound_estimate: f64,
    pub snapshots: Vec<Snapshot>,
    pub warnings: Vec<String>,
    /// Final iterates `x_i(K)`.
    pub final_iterates: Vec<Point>,
}

pub const CSV_HEADER: [&str; 5] = ["k", "objective", "max_disagreement", "max_infeasibility", "stepsize"];

impl RunTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Iterations actually executed.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.k)
    }

    /// Average of the final iterates.
    pub fn final_average(&self) -> Option<Point> {
        average(&self.final_iterates).ok()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.k.to_string(),
                r.objective.to_string(),
                r.max_disagreement.to_string(),
                r.max_infeasibility.map_or_else(String::new, |v| v.to_string()),
                r.stepsize.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-agent iterate dump: `k,agent,x0,x1,...`.
    pub fn write_iterates_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let d = self
            .snapshots
            .first()
            .and_then(|s| s.iterates.first())
            .map_or(0, Point::dim);
        let mut header = vec!["k".to_string(), "agent".to_string()];
        header.extend((0..d).map(|i| format!("x{i}")));
        w.write_record(&header)?;
        for snap in &self.snapshots {
            for (agent, x) in snap.iterates.iter().enumerate() {
                let mut row = vec![snap.k.to_string(), agent.to_string()];
                row.extend(x.to_dense().iter().map(f64::to_string));
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn average(points: &[Point]) -> Result<Point> {
    let d = points.first().map_or(0, Point::dim);
    let mut avg = Point::zeros(d);
    for p in points {
        avg.axpy(1.0, p)?;
    }
    avg.scale(1.0 / points.len().max(1) as f64);
    Ok(avg)
}
