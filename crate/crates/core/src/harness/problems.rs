use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::engine::AgentSpec;
use crate::error::{Error, Result};
use crate::geometry::{Component, ComponentKind, Point};
use crate::objectives::{Objective, Quadratic};

/// Recipe for a random network problem with quadratic local objectives
/// `f_i(x) = 1/2 (x - c_i)' Q_i (x - c_i)` and halfspace/ball components.
///
/// Every component contains the ball of radius `interior_radius` around the
/// origin, so the global feasible set has nonempty interior. The centers are
/// balanced so that the unconstrained minimizer of `sum_i f_i` is a shared
/// point `c0`, placed on a random ray from the origin at signed distance
/// `overshoot` beyond the boundary of the feasible set: negative values put
/// it inside, positive values make constraints active at the optimum with
/// multipliers that grow with the overshoot.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticProblemSpec {
    pub agents: usize,
    pub dim: usize,
    pub min_components: usize,
    pub max_components: usize,
    /// Eigenvalues of each `Q_i` are drawn uniformly from this range.
    pub curvature: (f64, f64),
    /// Range of the signed distance of `c0` past the boundary.
    pub overshoot: (f64, f64),
    /// Scale of the per-agent deviation of `c_i` from `c0`.
    pub heterogeneity: f64,
    pub interior_radius: f64,
    /// Fraction of components that are balls rather than halfspaces.
    pub ball_fraction: f64,
    pub seed: u64,
}

impl QuadraticProblemSpec {
    pub fn new(agents: usize, dim: usize, seed: u64) -> Self {
        QuadraticProblemSpec {
            agents,
            dim,
            min_components: 2,
            max_components: 6,
            curvature: (2.0, 4.0),
            overshoot: (-0.5, 0.5),
            heterogeneity: 0.5,
            interior_radius: 0.5,
            ball_fraction: 0.3,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.curvature;
        let ok = self.agents >= 1
            && self.dim >= 1
            && self.min_components >= 1
            && self.min_components <= self.max_components
            && lo > 0.0
            && lo <= hi
            && self.overshoot.0 <= self.overshoot.1
            && self.heterogeneity >= 0.0
            && self.interior_radius > 0.0
            && (0.0..=1.0).contains(&self.ball_fraction);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid problem recipe {self:?}")))
        }
    }

    pub fn generate(&self) -> Result<Vec<AgentSpec>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let d = self.dim;
        let m = self.agents;

        let components: Vec<Vec<Component>> = (0..m)
            .map(|_| {
                let count = rng.random_range(self.min_components..=self.max_components);
                (0..count).map(|_| self.random_component(&mut rng)).collect()
            })
            .collect::<Result<_>>()?;

        let u = unit_vector(&mut rng, d);
        let boundary = components
            .iter()
            .flatten()
            .map(|c| exit_distance(c, &u))
            .fold(f64::INFINITY, f64::min);
        let (lo, hi) = self.overshoot;
        let shift = if hi > lo { rng.random_range(lo..hi) } else { lo };
        // keep c0 on the origin's side of the ray
        let t = (boundary + shift).max(0.0);
        let c0 = DVector::from_iterator(d, u.iter().map(|x| x * t));

        let hessians: Vec<DMatrix<f64>> = (0..m).map(|_| random_spd(&mut rng, d, self.curvature)).collect();
        let offsets: Vec<DVector<f64>> = (0..m)
            .map(|_| DVector::from_vec(gaussian(&mut rng, d, self.heterogeneity)))
            .collect();
        // shift each offset by Q_i^{-1} mean_j(Q_j e_j) so that sum_i Q_i e_i = 0
        let mean = hessians
            .iter()
            .zip(&offsets)
            .fold(DVector::zeros(d), |acc, (q, e)| acc + q * e)
            / m as f64;

        hessians
            .into_iter()
            .zip(offsets)
            .zip(components)
            .map(|((q, e), comps)| {
                let correction = q
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::InvalidObjective("generated hessian is not positive definite".into()))?
                    .solve(&mean);
                let center = &c0 + e - correction;
                let objective = Objective::quadratic(Quadratic::centered(q, center.as_slice())?);
                AgentSpec::new(objective, comps)
            })
            .collect()
    }

    fn random_component(&self, rng: &mut ChaCha8Rng) -> Result<Component> {
        let d = self.dim;
        let r = self.interior_radius;
        if rng.random::<f64>() < self.ball_fraction {
            let center = gaussian(rng, d, 1.0);
            let dist = center.iter().map(|c| c * c).sum::<f64>().sqrt();
            let radius = dist + r + rng.random_range(0.0..1.0);
            Component::ball(Point::dense(center), radius)
        } else {
            let normal = unit_vector(rng, d);
            // distance from the origin to the boundary in [r, r + 1)
            let offset = r + rng.random_range(0.0..1.0);
            Component::halfspace(Point::dense(normal), offset)
        }
    }
}

/// Largest `t` with `t u` in the component, for a unit `u` and a component containing the origin.
fn exit_distance(c: &Component, u: &[f64]) -> f64 {
    match c.kind() {
        ComponentKind::Halfspace { normal, offset } => {
            let slope: f64 = normal.entries().map(|(i, a)| a * u[i]).sum();
            if slope > 0.0 {
                offset / slope
            } else {
                f64::INFINITY
            }
        }
        ComponentKind::Ball { center, radius } => {
            // |t u - z|^2 = r^2  =>  t = <u,z> + sqrt(<u,z>^2 - |z|^2 + r^2)
            let uz: f64 = center.entries().map(|(i, z)| z * u[i]).sum();
            uz + (uz * uz - center.norm_sq() + radius * radius).max(0.0).sqrt()
        }
        ComponentKind::Box { lo, hi } => u
            .iter()
            .enumerate()
            .map(|(i, &x)| match x {
                x if x > 0.0 => hi[i] / x,
                x if x < 0.0 => lo[i] / x,
                _ => f64::INFINITY,
            })
            .fold(f64::INFINITY, f64::min),
        ComponentKind::HalfspaceWithNonneg { normal, offset, coord } => {
            let slope: f64 = normal.entries().map(|(i, a)| a * u[i]).sum();
            let plane = if slope > 0.0 { offset / slope } else { f64::INFINITY };
            if u[*coord] < 0.0 {
                0.0
            } else {
                plane
            }
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut *rng);
            scale * z
        })
        .collect::<Vec<f64>>()
}

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let g = gaussian(rng, d, 1.0);
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            return g.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `R diag(lambda) R'` with `R` from the QR factorization of a Gaussian matrix.
fn random_spd(rng: &mut ChaCha8Rng, d: usize, (lo, hi): (f64, f64)) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(&mut *rng));
    let r = g.qr().q();
    let lambda = DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| {
        if hi > lo {
            rng.random_range(lo..hi)
        } else {
            lo
        }
    }));
    let q: DMatrix<f64> = &r * lambda * r.transpose();
    (&q + q.transpose()) * 0.5
}
