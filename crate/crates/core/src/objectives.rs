//! Smooth convex local objectives.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_dim, Error, Result};
use crate::geometry::Point;

/// `f(x) = 1/2 x'Qx + q'x + r` with `Q` symmetric positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    hessian: DMatrix<f64>,
    linear: DVector<f64>,
    constant: f64,
}

impl Quadratic {
    pub fn new(hessian: DMatrix<f64>, linear: Vec<f64>, constant: f64) -> Result<Self> {
        let d = hessian.nrows();
        if hessian.ncols() != d {
            return Err(Error::InvalidObjective(format!(
                "hessian must be square, got {}x{}",
                d,
                hessian.ncols()
            )));
        }
        ensure_dim(d, linear.len())?;
        let scale = hessian.amax().max(1.0);
        if (&hessian - hessian.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidObjective("hessian is not symmetric".into()));
        }
        // a small ridge lets semidefinite matrices factor
        let shifted = &hessian + DMatrix::identity(d, d) * (1e-10 * scale);
        if shifted.cholesky().is_none() {
            return Err(Error::InvalidObjective(
                "hessian is not positive semidefinite".into(),
            ));
        }
        Ok(Quadratic {
            hessian,
            linear: DVector::from_vec(linear),
            constant,
        })
    }

    /// `1/2 (x - c)' Q (x - c)`.
    pub fn centered(hessian: DMatrix<f64>, center: &[f64]) -> Result<Self> {
        let c = DVector::from_column_slice(center);
        let linear = -(&hessian * &c);
        let constant = 0.5 * c.dot(&(&hessian * &c));
        Self::new(hessian, linear.as_slice().to_vec(), constant)
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    pub fn linear(&self) -> &[f64] {
        self.linear.as_slice()
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Largest eigenvalue of `Q`.
    pub fn max_eigenvalue(&self) -> f64 {
        self.hessian
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x) + self.constant
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.hessian * x + &self.linear
    }
}

/// Agent-local share of the soft-margin SVM objective,
/// `1/(2m) |y|^2 + C * sum_{j in owned} xi_j` over `x = (y, xi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmLocal {
    weight_dim: usize,
    samples: usize,
    owned: BTreeSet<usize>,
    c: f64,
    agents: usize,
}

impl SvmLocal {
    /// `owned` holds 0-based sample indices; slack `j` lives at coordinate `weight_dim + j`.
    pub fn new(
        weight_dim: usize,
        samples: usize,
        owned: impl IntoIterator<Item = usize>,
        c: f64,
        agents: usize,
    ) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidObjective(format!("C must be > 0, got {c}")));
        }
        if agents == 0 {
            return Err(Error::InvalidObjective("agent count must be >= 1".into()));
        }
        let owned: BTreeSet<usize> = owned.into_iter().collect();
        if let Some(&j) = owned.iter().next_back() {
            if j >= samples {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    len: samples,
                });
            }
        }
        Ok(SvmLocal {
            weight_dim,
            samples,
            owned,
            c,
            agents,
        })
    }

    pub fn dim(&self) -> usize {
        self.weight_dim + self.samples
    }

    pub fn weight_dim(&self) -> usize {
        self.weight_dim
    }

    pub fn owned(&self) -> &BTreeSet<usize> {
        &self.owned
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn agents(&self) -> usize {
        self.agents
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObjectiveKind {
    Quadratic(Quadratic),
    SvmLocal(SvmLocal),
}

/// A convex differentiable local objective with a declared gradient Lipschitz constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    kind: ObjectiveKind,
    lipschitz: f64,
    gradient_bound: Option<f64>,
}

impl Objective {
    pub fn quadratic(q: Quadratic) -> Self {
        let lipschitz = q.max_eigenvalue().max(f64::EPSILON);
        Objective {
            kind: ObjectiveKind::Quadratic(q),
            lipschitz,
            gradient_bound: None,
        }
    }

    pub fn svm_local(s: SvmLocal) -> Self {
        let lipschitz = 1.0 / s.agents as f64;
        Objective {
            kind: ObjectiveKind::SvmLocal(s),
            lipschitz,
            gradient_bound: None,
        }
    }

    /// Overrides the declared Lipschitz constant (must be > 0).
    pub fn with_lipschitz(mut self, lipschitz: f64) -> Result<Self> {
        if !(lipschitz > 0.0) {
            return Err(Error::InvalidObjective(format!(
                "Lipschitz constant must be > 0, got {lipschitz}"
            )));
        }
        self.lipschitz = lipschitz;
        Ok(self)
    }

    pub fn with_gradient_bound(mut self, bound: f64) -> Self {
        self.gradient_bound = Some(bound);
        self
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn gradient_bound(&self) -> Option<f64> {
        self.gradient_bound
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ObjectiveKind::Quadratic(q) => q.dim(),
            ObjectiveKind::SvmLocal(s) => s.dim(),
        }
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        ensure_dim(self.dim(), x.dim())?;
        Ok(match &self.kind {
            ObjectiveKind::Quadratic(q) => q.value(&to_dvector(x)),
            ObjectiveKind::SvmLocal(s) => {
                let y_sq: f64 = x
                    .entries()
                    .take_while(|&(i, _)| i < s.weight_dim)
                    .map(|(_, v)| v * v)
                    .sum();
                let slack: f64 = s.owned.iter().map(|&j| x.get(s.weight_dim + j)).sum();
                y_sq / (2.0 * s.agents as f64) + s.c * slack
            }
        })
    }

    pub fn gradient(&self, x: &Point) -> Result<Point> {
        ensure_dim(self.dim(), x.dim())?;
        Ok(match &self.kind {
            ObjectiveKind::Quadratic(q) => {
                Point::dense(q.gradient(&to_dvector(x)).as_slice().to_vec())
            }
            ObjectiveKind::SvmLocal(s) => {
                let inv_m = 1.0 / s.agents as f64;
                let mut g = vec![0.0; s.dim()];
                for (i, v) in x.entries().take_while(|&(i, _)| i < s.weight_dim) {
                    g[i] = v * inv_m;
                }
                for &j in &s.owned {
                    g[s.weight_dim + j] = s.c;
                }
                Point::dense(g)
            }
        })
    }

    /// Sum of several objectives of the same family, e.g. the centralized
    /// objective of a network problem.
    pub fn total(parts: &[Objective]) -> Result<Objective> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidObjective("empty objective list".into()))?;
        let d = first.dim();
        for p in parts {
            ensure_dim(d, p.dim())?;
        }
        match &first.kind {
            ObjectiveKind::Quadratic(_) => {
                let mut hessian = DMatrix::zeros(d, d);
                let mut linear = DVector::zeros(d);
                let mut constant = 0.0;
                for p in parts {
                    match &p.kind {
                        ObjectiveKind::Quadratic(q) => {
                            hessian += &q.hessian;
                            linear += &q.linear;
                            constant += q.constant;
                        }
                        _ => return Err(mixed_families()),
                    }
                }
                // keep the sum exactly symmetric
                let hessian = (&hessian + hessian.transpose()) * 0.5;
                Ok(Objective::quadratic(Quadratic::new(
                    hessian,
                    linear.as_slice().to_vec(),
                    constant,
                )?))
            }
            ObjectiveKind::SvmLocal(s0) => {
                let mut owned = BTreeSet::new();
                let mut weight = 0.0;
                for p in parts {
                    match &p.kind {
                        ObjectiveKind::SvmLocal(s)
                            if s.c == s0.c && s.weight_dim == s0.weight_dim =>
                        {
                            owned.extend(s.owned.iter().copied());
                            weight += 1.0 / s.agents as f64;
                        }
                        _ => return Err(mixed_families()),
                    }
                }
                if (weight - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidObjective(format!(
                        "SVM shares sum to weight {weight} on |y|^2, expected 1"
                    )));
                }
                Ok(Objective::svm_local(SvmLocal::new(
                    s0.weight_dim,
                    s0.samples,
                    owned,
                    s0.c,
                    1,
                )?))
            }
        }
    }
}

fn mixed_families() -> Error {
    Error::InvalidObjective("cannot sum objectives of different families".into())
}

fn to_dvector(x: &Point) -> DVector<f64> {
    match x.as_dense() {
        Some(v) => DVector::from_column_slice(v),
        None => DVector::from_vec(x.to_dense()),
    }
}
