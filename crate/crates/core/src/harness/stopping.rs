use std::fmt;
use std::str::FromStr;

use crate::engine::TraceRecord;
use crate::error::{Error, Result};

/// Relative tolerance of the objective-change rule used to calibrate the target accuracy.
pub const DEFAULT_RELATIVE_THETA: f64 = 0.001;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StoppingRule {
    /// Fires at the first record with `k >= K`.
    MaxIters(usize),
    /// Fires at `k` for the first pair of consecutive records `(k, k')` with
    /// `|f(k) - f(k')| / f(k) < theta`; if `f(k) <= 0` the absolute change is
    /// compared with `theta` instead.
    RelativeObjective { theta: f64 },
    /// Fires at the first record where every agent's accuracy is at least `t_acc`.
    TargetAccuracy { t_acc: f64 },
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            StoppingRule::MaxIters(_) => true,
            StoppingRule::RelativeObjective { theta } => theta > 0.0 && theta.is_finite(),
            StoppingRule::TargetAccuracy { t_acc } => t_acc > 0.0 && t_acc <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid stopping rule {self}")))
        }
    }

    pub fn needs_accuracy(&self) -> bool {
        matches!(self, StoppingRule::TargetAccuracy { .. })
    }
}

impl fmt::Display for StoppingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoppingRule::MaxIters(k) => write!(f, "max-iters:{k}"),
            StoppingRule::RelativeObjective { theta } => write!(f, "relative:{theta}"),
            StoppingRule::TargetAccuracy { t_acc } => write!(f, "accuracy:{t_acc}"),
        }
    }
}

impl FromStr for StoppingRule {
    type Err = Error;

    /// `max-iters:K`, `relative[:THETA]` or `accuracy:T`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse stopping rule {s:?}"));
        let (tag, arg) = match s.split_once(':') {
            Some((t, a)) => (t, Some(a)),
            None => (s, None),
        };
        let rule = match (tag, arg) {
            ("max-iters", Some(a)) => StoppingRule::MaxIters(a.parse().map_err(|_| bad())?),
            ("relative", None) => StoppingRule::RelativeObjective {
                theta: DEFAULT_RELATIVE_THETA,
            },
            ("relative", Some(a)) => StoppingRule::RelativeObjective {
                theta: a.parse().map_err(|_| bad())?,
            },
            ("accuracy", Some(a)) => StoppingRule::TargetAccuracy {
                t_acc: a.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        rule.validate()?;
        Ok(rule)
    }
}

/// Where a rule fired: `k` is the iteration the rule attributes the stop to,
/// `record` the index of the record that completed the test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopDecision {
    pub k: usize,
    pub record: usize,
}

/// Tests the rule on the newest record only, given everything before it.
pub fn check_tail(rule: &StoppingRule, history: &[TraceRecord], latest: &TraceRecord) -> Option<usize> {
    match *rule {
        StoppingRule::MaxIters(limit) => (latest.k >= limit).then_some(latest.k),
        StoppingRule::RelativeObjective { theta } => {
            let prev = history.last()?;
            let change = (prev.objective - latest.objective).abs();
            let fired = if prev.objective > 0.0 {
                change / prev.objective < theta
            } else {
                change < theta
            };
            fired.then_some(prev.k)
        }
        StoppingRule::TargetAccuracy { t_acc } => {
            let acc = latest.accuracy.as_ref()?;
            let all = !acc.is_empty() && acc.iter().all(|a| *a >= t_acc);
            all.then_some(latest.k)
        }
    }
}

/// First point at which `rule` fires on `records`, scanning in order.
pub fn evaluate_stopping(rule: &StoppingRule, records: &[TraceRecord]) -> Option<StopDecision> {
    (0..records.len()).find_map(|i| {
        check_tail(rule, &records[..i], &records[i]).map(|k| StopDecision { k, record: i })
    })
}
