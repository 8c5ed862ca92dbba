use crate::error::{ensure_dim, Error, Result};
use crate::geometry::Point;
use crate::network::WeightMatrix;

use super::AgentSpec;

/// `v_i = sum_j W_ij x_j` for every agent.
pub fn mix(iterates: &[Point], weights: &WeightMatrix) -> Result<Vec<Point>> {
    let m = weights.agents();
    ensure_dim(m, iterates.len())?;
    let d = iterates.first().map_or(0, Point::dim);
    for x in iterates {
        ensure_dim(d, x.dim())?;
    }
    (0..m)
        .map(|i| {
            let mut v = Point::zeros(d);
            for (j, x) in iterates.iter().enumerate() {
                let w = weights.get(i, j);
                if w != 0.0 {
                    v.axpy(w, x)?;
                }
            }
            Ok(v)
        })
        .collect()
}

/// `v - alpha * grad f(v)` together with `|grad f(v)|`.
pub(crate) fn descend(agent: &AgentSpec, v: &Point, alpha: f64) -> Result<(Point, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("stepsize must be > 0, got {alpha}")));
    }
    let grad = agent.objective().gradient(v)?;
    let mut psi = v.clone();
    psi.axpy(-alpha, &grad)?;
    Ok((psi, grad.norm()))
}

/// One random-projection update: project `v - alpha grad f(v)` onto component `omega`.
pub fn drp_step(agent: &AgentSpec, v: &Point, alpha: f64, omega: usize) -> Result<Point> {
    let (mut psi, _) = descend(agent, v, alpha)?;
    agent.component(omega)?.project_in_place(&mut psi)?;
    Ok(psi)
}

/// Gradient step followed by successive projections onto `omegas` in order.
pub fn minibatch_step(agent: &AgentSpec, v: &Point, alpha: f64, omegas: &[usize]) -> Result<Point> {
    minibatch_step_traced(agent, v, alpha, omegas, |_, _| {})
}

/// [`minibatch_step`] that reports every intermediate point `psi^r`, `r = 0..=b`.
pub fn minibatch_step_traced(
    agent: &AgentSpec,
    v: &Point,
    alpha: f64,
    omegas: &[usize],
    observer: impl FnMut(usize, &Point),
) -> Result<Point> {
    let (psi, _) = descend(agent, v, alpha)?;
    project_chain(agent, psi, omegas, observer)
}

pub(crate) fn project_chain(
    agent: &AgentSpec,
    mut psi: Point,
    omegas: &[usize],
    mut observer: impl FnMut(usize, &Point),
) -> Result<Point> {
    if omegas.is_empty() {
        return Err(Error::InvalidArgument("batch needs at least one component".into()));
    }
    observer(0, &psi);
    for (r, &omega) in omegas.iter().enumerate() {
        agent.component(omega)?.project_in_place(&mut psi)?;
        observer(r + 1, &psi);
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Component;
    use crate::objectives::{Objective, Quadratic};
    use nalgebra::DMatrix;

    fn half_norm_sq(d: usize) -> Objective {
        Objective::quadratic(Quadratic::new(DMatrix::identity(d, d), vec![0.0; d], 0.0).unwrap())
    }

    #[test]
    fn mix_two_agents() {
        let w = WeightMatrix::uniform(2);
        let v = mix(&[Point::dense(vec![0.0]), Point::dense(vec![2.0])], &w).unwrap();
        assert_eq!(v, vec![Point::dense(vec![1.0]); 2]);
    }

    #[test]
    fn mix_identical_points() {
        let w = crate::network::metropolis_weights(
            &crate::network::EdgeSet::from_undirected(3, [(0, 1), (1, 2)]).unwrap(),
        )
        .unwrap();
        let p = Point::dense(vec![0.3, -1.7]);
        for v in mix(&vec![p.clone(); 3], &w).unwrap() {
            assert!(v.approx_eq(&p, 1e-15));
        }
    }

    #[test]
    fn mix_rejects_wrong_agent_count() {
        assert!(mix(&[Point::zeros(1)], &WeightMatrix::uniform(2)).is_err());
    }

    #[test]
    fn gradient_then_identity_projection() {
        let agent = AgentSpec::new(
            half_norm_sq(1),
            vec![Component::ball(Point::zeros(1), 10.0).unwrap()],
        )
        .unwrap();
        let x = drp_step(&agent, &Point::dense(vec![4.0]), 1.0, 0).unwrap();
        assert_eq!(x, Point::dense(vec![0.0]));
    }

    #[test]
    fn pure_projection_with_zero_gradient() {
        let flat = Objective::quadratic(Quadratic::new(DMatrix::zeros(2, 2), vec![0.0; 2], 0.0).unwrap());
        let agent = AgentSpec::new(
            flat,
            vec![Component::halfspace(Point::dense(vec![1.0, 0.0]), 0.0).unwrap()],
        )
        .unwrap();
        let x = drp_step(&agent, &Point::dense(vec![1.0, 0.0]), 0.5, 0).unwrap();
        assert_eq!(x, Point::zeros(2));
    }

    #[test]
    fn bad_stepsize_and_index() {
        let agent = AgentSpec::new(
            half_norm_sq(1),
            vec![Component::ball(Point::zeros(1), 1.0).unwrap()],
        )
        .unwrap();
        let v = Point::dense(vec![1.0]);
        assert!(drp_step(&agent, &v, 0.0, 0).is_err());
        assert!(drp_step(&agent, &v, 0.1, 1).is_err());
        assert!(minibatch_step(&agent, &v, 0.1, &[]).is_err());
    }

    #[test]
    fn repeated_component_matches_single_projection() {
        let agent = AgentSpec::new(
            half_norm_sq(2),
            vec![
                Component::halfspace(Point::dense(vec![1.0, 1.0]), -1.0).unwrap(),
                Component::ball(Point::zeros(2), 0.5).unwrap(),
            ],
        )
        .unwrap();
        let v = Point::dense(vec![3.0, -2.0]);
        let one = drp_step(&agent, &v, 0.3, 0).unwrap();
        let three = minibatch_step(&agent, &v, 0.3, &[0, 0, 0]).unwrap();
        assert!(one.approx_eq(&three, 1e-15));
    }
}
