use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Stepsize `alpha_k` as a function of the iteration index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepsizeSchedule {
    /// `a0 / (k + 1)`
    Harmonic { a0: f64 },
    Constant { alpha: f64 },
    /// `a0 / (k + 1)^p`
    PowerLaw { a0: f64, p: f64 },
}

impl StepsizeSchedule {
    pub fn at(&self, k: usize) -> f64 {
        let t = (k + 1) as f64;
        match *self {
            StepsizeSchedule::Harmonic { a0 } => a0 / t,
            StepsizeSchedule::Constant { alpha } => alpha,
            StepsizeSchedule::PowerLaw { a0, p } => a0 / t.powf(p),
        }
    }

    /// Whether `sum alpha_k = inf` and `sum alpha_k^2 < inf`.
    pub fn is_diminishing_square_summable(&self) -> bool {
        match *self {
            StepsizeSchedule::Harmonic { .. } => true,
            StepsizeSchedule::Constant { .. } => false,
            StepsizeSchedule::PowerLaw { p, .. } => p > 0.5 && p <= 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            StepsizeSchedule::Harmonic { a0 } => a0 > 0.0 && a0.is_finite(),
            StepsizeSchedule::Constant { alpha } => alpha > 0.0 && alpha.is_finite(),
            StepsizeSchedule::PowerLaw { a0, p } => a0 > 0.0 && a0.is_finite() && p.is_finite() && p > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid stepsize schedule {self}")))
        }
    }
}

impl Default for StepsizeSchedule {
    fn default() -> Self {
        StepsizeSchedule::Harmonic { a0: 1.0 }
    }
}

impl fmt::Display for StepsizeSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepsizeSchedule::Harmonic { a0 } => write!(f, "harmonic:{a0}"),
            StepsizeSchedule::Constant { alpha } => write!(f, "constant:{alpha}"),
            StepsizeSchedule::PowerLaw { a0, p } => write!(f, "power:{a0}:{p}"),
        }
    }
}

/// Parses `harmonic:A0`, `constant:ALPHA` or `power:A0:P`.
impl FromStr for StepsizeSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|e| Error::InvalidConfig(format!("bad number '{x}' in stepsize '{s}': {e}")))
        };
        let sched = match parts.as_slice() {
            ["harmonic"] => StepsizeSchedule::Harmonic { a0: 1.0 },
            ["harmonic", a0] => StepsizeSchedule::Harmonic { a0: num(a0)? },
            ["constant", alpha] => StepsizeSchedule::Constant { alpha: num(alpha)? },
            ["power", a0, p] => StepsizeSchedule::PowerLaw {
                a0: num(a0)?,
                p: num(p)?,
            },
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown stepsize '{s}' (expected harmonic:A0, constant:ALPHA or power:A0:P)"
                )))
            }
        };
        sched.validate()?;
        Ok(sched)
    }
}
