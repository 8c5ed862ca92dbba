//! Reference solvers shared by the integration tests. Nothing here calls
//! into the projection code under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Minimizes `1/2 x'Hx + g'x` subject to `Ax <= b` by enumerating every
/// candidate active set, solving its KKT system and keeping the feasible,
/// dual-feasible point with the lowest objective. Exponential in the number
/// of constraints; meant for a handful of them.
pub fn active_set_qp(h: &DMatrix<f64>, g: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = h.nrows();
    let p = a.nrows();
    let objective = |x: &DVector<f64>| 0.5 * x.dot(&(h * x)) + g.dot(x);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1 << p) {
        let active: Vec<usize> = (0..p).filter(|j| mask & (1 << j) != 0).collect();
        let k = active.len();
        if k > n {
            continue;
        }
        let mut kkt = DMatrix::zeros(n + k, n + k);
        kkt.view_mut((0, 0), (n, n)).copy_from(h);
        let mut rhs = DVector::zeros(n + k);
        rhs.rows_mut(0, n).copy_from(&(-g));
        for (r, &j) in active.iter().enumerate() {
            for c in 0..n {
                kkt[(n + r, c)] = a[(j, c)];
                kkt[(c, n + r)] = a[(j, c)];
            }
            rhs[n + r] = b[j];
        }
        let Some(sol) = kkt.lu().solve(&rhs) else {
            continue;
        };
        if !sol.iter().all(|v| v.is_finite()) {
            continue;
        }
        let x = sol.rows(0, n).into_owned();
        let duals_ok = (0..k).all(|r| sol[n + r] >= -1e-10);
        let primal_ok = (0..p).all(|j| a.row(j).transpose().dot(&x) <= b[j] + 1e-10);
        if duals_ok && primal_ok {
            let f = objective(&x);
            if best.as_ref().is_none_or(|(fb, _)| f < *fb - 1e-14) {
                best = Some((f, x));
            }
        }
    }
    best.map(|(_, x)| x)
}

/// Euclidean projection of `v` onto `{x | Ax <= b}`.
pub fn project_polyhedron(v: &[f64], a: &DMatrix<f64>, b: &DVector<f64>) -> Option<Vec<f64>> {
    let n = v.len();
    let g = -DVector::from_column_slice(v);
    active_set_qp(&DMatrix::identity(n, n), &g, a, b).map(|x| x.as_slice().to_vec())
}

/// Rows of `A` and `b` for `{w | <a,w> <= b, w_i >= 0}`.
pub fn two_halfspaces(a: &[f64], b: f64, i: usize) -> (DMatrix<f64>, DVector<f64>) {
    let n = a.len();
    let mut m = DMatrix::zeros(2, n);
    for c in 0..n {
        m[(0, c)] = a[c];
    }
    m[(1, i)] = -1.0;
    (m, DVector::from_vec(vec![b, 0.0]))
}

/// Brute-force `argmin |w - v|` over a grid of `[lo, hi]^2` restricted to `feasible`.
pub fn grid_projection_2d(v: [f64; 2], lo: f64, hi: f64, steps: usize, feasible: impl Fn([f64; 2]) -> bool) -> [f64; 2] {
    let h = (hi - lo) / steps as f64;
    let mut best = ([f64::NAN; 2], f64::INFINITY);
    for i in 0..=steps {
        for j in 0..=steps {
            let w = [lo + i as f64 * h, lo + j as f64 * h];
            if feasible(w) {
                let d = (w[0] - v[0]).powi(2) + (w[1] - v[1]).powi(2);
                if d < best.1 {
                    best = (w, d);
                }
            }
        }
    }
    best.0
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

use drp::geometry::{Component, ComponentKind, Point};
use rand::Rng;

pub fn gaussian_vec<R: Rng>(rng: &mut R, d: usize, scale: f64) -> Vec<f64> {
    (0..d)
        .map(|_| scale * rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect()
}

/// A random component of the given variant (0 halfspace, 1 box, 2 ball, 3 two-halfspace).
pub fn random_component<R: Rng>(rng: &mut R, d: usize, variant: usize) -> Component {
    match variant {
        0 => {
            let mut a = gaussian_vec(rng, d, 1.0);
            if a.iter().all(|x| *x == 0.0) {
                a[0] = 1.0;
            }
            Component::halfspace(Point::dense(a), rng.random_range(-1.0..1.0)).unwrap()
        }
        1 => {
            let lo: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..0.5)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.0..2.0)).collect();
            Component::boxed(lo, hi).unwrap()
        }
        2 => Component::ball(Point::dense(gaussian_vec(rng, d, 1.0)), rng.random_range(0.0..2.0)).unwrap(),
        _ => {
            let d = d.max(2);
            let i = rng.random_range(0..d);
            let mut a = gaussian_vec(rng, d, 1.0);
            // keep some coefficient off coordinate i so the instance is not degenerate
            let j = (i + 1) % d;
            if a[j].abs() < 0.1 {
                a[j] = 0.1_f64.copysign(a[j]);
            }
            Component::halfspace_with_nonneg(Point::dense(a), rng.random_range(-1.0..1.0), i).unwrap()
        }
    }
}

/// Membership evaluated straight from the defining inequalities.
pub fn member(c: &Component, x: &[f64], tol: f64) -> bool {
    let dot = |a: &Point| -> f64 { a.entries().map(|(i, v)| v * x[i]).sum() };
    match c.kind() {
        ComponentKind::Halfspace { normal, offset } => dot(normal) <= offset + tol,
        ComponentKind::Box { lo, hi } => (0..x.len()).all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol),
        ComponentKind::Ball { center, radius } => dist(x, &center.to_dense()) <= radius + tol,
        ComponentKind::HalfspaceWithNonneg { normal, offset, coord } => {
            dot(normal) <= offset + tol && x[*coord] >= -tol
        }
    }
}

/// A point of `c` found by rejection sampling around a known-feasible anchor.
pub fn random_member<R: Rng>(rng: &mut R, c: &Component) -> Vec<f64> {
    let d = c.dim();
    let anchor: Vec<f64> = match c.kind() {
        ComponentKind::Halfspace { normal, offset } => {
            let a = normal.to_dense();
            let nn: f64 = a.iter().map(|v| v * v).sum();
            a.iter().map(|v| v * (offset - 1.0) / nn).collect()
        }
        ComponentKind::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
        ComponentKind::Ball { center, .. } => center.to_dense(),
        ComponentKind::HalfspaceWithNonneg { normal, offset, coord } => {
            // move far along -a within the other coordinates, keep w_i = 1
            let a = normal.to_dense();
            let mut w = vec![0.0; d];
            w[*coord] = 1.0;
            let rest: f64 = (0..d).filter(|j| j != coord).map(|j| a[j] * a[j]).sum();
            let t = (a[*coord] - offset + 1.0) / rest;
            for j in (0..d).filter(|j| j != coord) {
                w[j] = -t * a[j];
            }
            w
        }
    };
    assert!(member(c, &anchor, 1e-9), "anchor outside {c:?}");
    let mut scale = 2.0;
    loop {
        for _ in 0..20 {
            let y: Vec<f64> = anchor.iter().zip(gaussian_vec(rng, d, scale)).map(|(a, z)| a + z).collect();
            if member(c, &y, 0.0) {
                return y;
            }
        }
        scale *= 0.5;
        if scale < 1e-6 {
            return anchor;
        }
    }
}

use drp::network::{EdgeSet, Topology, TopologySchedule};

/// A random `q`-periodic undirected schedule on `m` agents: the edges of a
/// random spanning tree are scattered over the `q` steps of the period, plus
/// a few extra random edges, so every window of `q` steps is connected.
pub fn random_schedule<R: Rng>(rng: &mut R, m: usize, q: usize) -> TopologySchedule {
    let mut steps: Vec<Vec<(usize, usize)>> = vec![Vec::new(); q];
    for v in 1..m {
        let u = rng.random_range(0..v);
        steps[rng.random_range(0..q)].push((u, v));
    }
    for _ in 0..rng.random_range(0..=m) {
        let (u, v) = (rng.random_range(0..m), rng.random_range(0..m));
        if u != v {
            steps[rng.random_range(0..q)].push((u, v));
        }
    }
    let edge_sets = steps
        .into_iter()
        .map(|pairs| EdgeSet::from_undirected(m, pairs).unwrap())
        .collect();
    TopologySchedule::new(m, Topology::PeriodicSequence { edge_sets, q }, 0).unwrap()
}
