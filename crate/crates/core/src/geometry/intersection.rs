use crate::error::{ensure_dim, Error, Result};

use super::{Component, Point};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

/// A finite intersection of constraint components.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntersectionSet {
    components: Vec<Component>,
}

/// Result of the iterative projection onto an intersection.
#[derive(Clone, Debug)]
pub struct IntersectionProjection {
    pub point: Point,
    pub sweeps: usize,
    /// Largest distance from `point` to any single component.
    pub max_violation: f64,
    pub converged: bool,
}

impl IntersectionSet {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if let Some(first) = components.first() {
            for c in &components[1..] {
                ensure_dim(first.dim(), c.dim())?;
            }
        }
        Ok(IntersectionSet { components })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.components.first().map(Component::dim)
    }

    pub fn max_violation(&self, v: &Point) -> Result<f64> {
        self.components
            .iter()
            .try_fold(0.0_f64, |m, c| Ok(m.max(c.distance(v)?)))
    }

    pub fn contains(&self, v: &Point, tol: f64) -> Result<bool> {
        for c in &self.components {
            if !c.contains(v, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Projection onto the intersection by Dykstra's alternating projections.
    ///
    /// Unlike plain cyclic projections the correction terms make the limit the
    /// metric projection, not just some feasible point. Stops once a full
    /// sweep moves the iterate by at most `tol` and every component is within
    /// `tol`; otherwise reports `converged = false` after `max_sweeps`.
    pub fn project(&self, v: &Point, tol: f64, max_sweeps: usize) -> Result<IntersectionProjection> {
        if self.components.is_empty() {
            return Err(Error::InvalidArgument("empty intersection".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be > 0, got {tol}")));
        }
        ensure_dim(self.components[0].dim(), v.dim())?;

        if self.components.len() == 1 {
            let point = self.components[0].project(v)?;
            return Ok(IntersectionProjection {
                point,
                sweeps: 1,
                max_violation: 0.0,
                converged: true,
            });
        }

        let mut x = v.clone();
        x.densify();
        let mut corrections: Vec<Option<Point>> = vec![None; self.components.len()];
        let mut sweeps = 0;
        let mut max_violation = f64::INFINITY;
        while sweeps < max_sweeps {
            sweeps += 1;
            let before = x.clone();
            for (c, corr) in self.components.iter().zip(corrections.iter_mut()) {
                let mut y = x.clone();
                if let Some(p) = corr.as_ref() {
                    y.axpy(1.0, p)?;
                }
                let mut projected = y.clone();
                c.project_in_place(&mut projected)?;
                y.axpy(-1.0, &projected)?;
                *corr = if y.norm_sq() == 0.0 { None } else { Some(y) };
                x = projected;
            }
            if x.distance(&before)? <= tol {
                max_violation = self.max_violation(&x)?;
                if max_violation <= tol {
                    return Ok(IntersectionProjection {
                        point: x,
                        sweeps,
                        max_violation,
                        converged: true,
                    });
                }
            }
        }
        if max_violation.is_infinite() {
            max_violation = self.max_violation(&x)?;
        }
        Ok(IntersectionProjection {
            point: x,
            sweeps,
            max_violation,
            converged: false,
        })
    }

    /// Distance to the intersection measured through [`IntersectionSet::project`].
    pub fn distance(&self, v: &Point, tol: f64, max_sweeps: usize) -> Result<f64> {
        let proj = self.project(v, tol, max_sweeps)?;
        v.distance(&proj.point)
    }
}
