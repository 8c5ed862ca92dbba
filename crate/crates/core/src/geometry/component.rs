use crate::error::{ensure_dim, Error, Result};

use super::Point;

/// Membership tolerance for freshly projected points.
pub const PROJECTION_TOL: f64 = 1e-9;

/// One simple closed convex set with a closed-form projection.
#[derive(Clone, Debug, PartialEq)]
pub enum ComponentKind {
    /// `{x | <a, x> <= b}`
    Halfspace { normal: Point, offset: f64 },
    /// `{x | lo <= x <= hi}` componentwise
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `{x | |x - center| <= radius}`
    Ball { center: Point, radius: f64 },
    /// `{x | <a, x> <= b, x[coord] >= 0}`
    HalfspaceWithNonneg {
        normal: Point,
        offset: f64,
        coord: usize,
    },
}

/// A validated constraint component. Construct through the named constructors.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    kind: ComponentKind,
}

impl Component {
    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Component {
            kind: ComponentKind::Halfspace { normal, offset },
        })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        ensure_dim(lo.len(), hi.len())?;
        if let Some(i) = (0..lo.len()).find(|&i| !(lo[i] <= hi[i])) {
            return Err(Error::InvalidComponent(format!(
                "box bounds out of order at coordinate {i}: {} > {}",
                lo[i], hi[i]
            )));
        }
        Ok(Component {
            kind: ComponentKind::Box { lo, hi },
        })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidComponent(format!(
                "ball radius must be finite and >= 0, got {radius}"
            )));
        }
        if !center.all_finite() {
            return Err(Error::InvalidComponent("ball center is not finite".into()));
        }
        Ok(Component {
            kind: ComponentKind::Ball { center, radius },
        })
    }

    pub fn halfspace_with_nonneg(normal: Point, offset: f64, coord: usize) -> Result<Self> {
        check_normal(&normal, offset)?;
        if coord >= normal.dim() {
            return Err(Error::IndexOutOfRange {
                index: coord,
                len: normal.dim(),
            });
        }
        Ok(Component {
            kind: ComponentKind::HalfspaceWithNonneg {
                normal,
                offset,
                coord,
            },
        })
    }

    pub fn kind(&self) -> &ComponentKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ComponentKind::Halfspace { normal, .. } => normal.dim(),
            ComponentKind::Box { lo, .. } => lo.len(),
            ComponentKind::Ball { center, .. } => center.dim(),
            ComponentKind::HalfspaceWithNonneg { normal, .. } => normal.dim(),
        }
    }

    /// Whether this is an intersection of linear inequalities (the family for
    /// which the linear-regularity condition on the feasible set is known to hold).
    pub fn is_polyhedral(&self) -> bool {
        !matches!(self.kind, ComponentKind::Ball { .. })
    }

    /// Euclidean projection of `v` onto the component.
    pub fn project(&self, v: &Point) -> Result<Point> {
        let mut w = v.clone();
        self.project_in_place(&mut w)?;
        Ok(w)
    }

    pub fn project_in_place(&self, v: &mut Point) -> Result<()> {
        ensure_dim(self.dim(), v.dim())?;
        match &self.kind {
            ComponentKind::Halfspace { normal, offset } => {
                let excess = normal.dot(v)? - offset;
                if excess > 0.0 {
                    v.axpy(-excess / normal.norm_sq(), normal)?;
                }
            }
            ComponentKind::Box { lo, hi } => {
                if v.is_sparse() && lo.iter().zip(hi).any(|(l, h)| *l > 0.0 || *h < 0.0) {
                    v.densify();
                }
                match v {
                    Point::Dense(x) => {
                        for ((xi, l), h) in x.iter_mut().zip(lo).zip(hi) {
                            *xi = xi.clamp(*l, *h);
                        }
                    }
                    Point::Sparse(_) => {
                        // every implicit zero is inside the box
                        let stored: Vec<(usize, f64)> = v.entries().collect();
                        for (i, x) in stored {
                            v.set(i, x.clamp(lo[i], hi[i]));
                        }
                    }
                }
            }
            ComponentKind::Ball { center, radius } => {
                let dist = v.distance(center)?;
                if dist > *radius {
                    // c + (r/|v-c|)(v-c)
                    let t = radius / dist;
                    v.scale(t);
                    v.axpy(1.0 - t, center)?;
                }
            }
            ComponentKind::HalfspaceWithNonneg {
                normal,
                offset,
                coord,
            } => project_halfspace_with_nonneg(normal, *offset, *coord, v)?,
        }
        Ok(())
    }

    /// `|v - project(v)|`.
    pub fn distance(&self, v: &Point) -> Result<f64> {
        let p = self.project(v)?;
        v.distance(&p)
    }

    pub fn contains(&self, v: &Point, tol: f64) -> Result<bool> {
        Ok(self.distance(v)? <= tol)
    }
}

fn check_normal(normal: &Point, offset: f64) -> Result<()> {
    if !offset.is_finite() || !normal.all_finite() {
        return Err(Error::InvalidComponent("non-finite halfspace data".into()));
    }
    if normal.norm_sq() == 0.0 {
        return Err(Error::InvalidComponent("halfspace normal is zero".into()));
    }
    Ok(())
}

/// Projection onto `{w | <a,w> <= b, w_i >= 0}` by region dispatch.
///
/// The four regions are split by the signs of `<a,v> - b` and `v_i`. When
/// both constraints are violated the halfspace-only and coordinate-only
/// projections are tried before the intersection of both hyperplanes: with
/// `a_i < 0` either of them can already be feasible and is then the answer.
/// The coordinate-plane candidate is `v - v_i e_i`.
fn project_halfspace_with_nonneg(
    normal: &Point,
    offset: f64,
    coord: usize,
    v: &mut Point,
) -> Result<()> {
    let s = normal.dot(v)?;
    let vi = v.get(coord);
    let ai = normal.get(coord);
    let norm_sq = normal.norm_sq();

    let halfspace_ok = s <= offset;
    let coord_ok = vi >= 0.0;

    // projection onto <a,w> = b
    let hyper_step = (s - offset) / norm_sq;
    let hyper_coord = vi - hyper_step * ai;
    // projection onto w_i = 0 keeps every other coordinate
    let coord_plane_value = s - ai * vi;

    enum Choice {
        Identity,
        Hyperplane,
        CoordPlane,
        Both,
    }

    let choice = match (halfspace_ok, coord_ok) {
        (true, true) => Choice::Identity,
        (false, false) => {
            if hyper_coord >= 0.0 {
                Choice::Hyperplane
            } else if coord_plane_value <= offset {
                Choice::CoordPlane
            } else {
                Choice::Both
            }
        }
        (false, true) => {
            if hyper_coord >= 0.0 {
                Choice::Hyperplane
            } else {
                Choice::Both
            }
        }
        (true, false) => {
            if coord_plane_value <= offset {
                Choice::CoordPlane
            } else {
                Choice::Both
            }
        }
    };

    match choice {
        Choice::Identity => {}
        Choice::Hyperplane => v.axpy(-hyper_step, normal)?,
        Choice::CoordPlane => v.set(coord, 0.0),
        Choice::Both => {
            let rest_sq = norm_sq - ai * ai;
            if !(rest_sq > 0.0) {
                return Err(Error::Degenerate(format!(
                    "normal is zero outside coordinate {coord}; the two boundary hyperplanes are parallel"
                )));
            }
            // theta = (sum_{j != i} a_j v_j - b) / sum_{j != i} a_j^2
            let theta = (coord_plane_value - offset) / rest_sq;
            v.axpy(-theta, normal)?;
            v.set(coord, 0.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::dense(v.to_vec())
    }

    #[test]
    fn halfspace_examples() {
        let h = Component::halfspace(p(&[1.0, 0.0]), 1.0).unwrap();
        assert_eq!(h.project(&p(&[0.5, 3.0])).unwrap(), p(&[0.5, 3.0]));
        assert_eq!(h.project(&p(&[2.0, 0.0])).unwrap(), p(&[1.0, 0.0]));

        let h0 = Component::halfspace(p(&[1.0, 0.0]), 0.0).unwrap();
        assert_eq!(h0.distance(&p(&[2.0, 7.0])).unwrap(), 2.0);
    }

    #[test]
    fn ball_radial_scaling() {
        let b = Component::ball(Point::zeros(2), 1.0).unwrap();
        let w = b.project(&p(&[3.0, 4.0])).unwrap();
        assert!(w.approx_eq(&p(&[0.6, 0.8]), 1e-15));
        assert!(!b.contains(&p(&[1.0, 1.0]), 0.0).unwrap());
    }

    #[test]
    fn box_membership_tolerance() {
        let b = Component::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(b.contains(&p(&[0.5, 0.5]), 0.0).unwrap());
        assert!(b.contains(&p(&[1.0 + 1e-12, 0.5]), 1e-9).unwrap());
        assert!(!b.contains(&p(&[1.0 + 1e-6, 0.5]), 1e-9).unwrap());
    }

    #[test]
    fn malformed_components_rejected() {
        assert!(Component::halfspace(Point::zeros(2), 1.0).is_err());
        assert!(Component::boxed(vec![1.0], vec![0.0]).is_err());
        assert!(Component::boxed(vec![0.0], vec![0.0, 1.0]).is_err());
        assert!(Component::ball(Point::zeros(2), -1.0).is_err());
        assert!(Component::halfspace_with_nonneg(p(&[1.0, 1.0]), 0.0, 2).is_err());
    }

    #[test]
    fn projection_rejects_dimension_mismatch() {
        let h = Component::halfspace(p(&[1.0, 0.0]), 1.0).unwrap();
        assert!(matches!(
            h.project(&p(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn halfspace_with_nonneg_golden() {
        // <a,v> = 1 <= b, v_1 < 0; moving onto w_1 = 0 gives <a,w> = 2 > b,
        // so both hyperplanes are active: theta = (2 - 1)/1.
        let c = Component::halfspace_with_nonneg(p(&[1.0, 1.0]), 1.0, 1).unwrap();
        let w = c.project(&p(&[2.0, -1.0])).unwrap();
        assert_eq!(w, p(&[1.0, 0.0]));
    }

    #[test]
    fn halfspace_with_nonneg_each_region() {
        let c = Component::halfspace_with_nonneg(p(&[1.0, 1.0]), 1.0, 1).unwrap();
        // inside
        assert_eq!(c.project(&p(&[0.2, 0.3])).unwrap(), p(&[0.2, 0.3]));
        // halfspace violated, w_i stays positive after hyperplane projection
        assert!(c
            .project(&p(&[1.0, 2.0]))
            .unwrap()
            .approx_eq(&p(&[0.0, 1.0]), 1e-15));
        // halfspace violated, hyperplane projection would make w_i negative
        assert!(c
            .project(&p(&[5.0, 0.5]))
            .unwrap()
            .approx_eq(&p(&[1.0, 0.0]), 1e-15));
        // only the sign constraint violated and the coordinate plane is feasible
        assert_eq!(c.project(&p(&[0.5, -3.0])).unwrap(), p(&[0.5, 0.0]));
    }

    #[test]
    fn both_violated_with_negative_coefficient() {
        // a_i < 0: the halfspace projection alone already satisfies w_i >= 0
        let c = Component::halfspace_with_nonneg(p(&[1.0, -1.0]), 0.0, 1).unwrap();
        let w = c.project(&p(&[1.0, -0.5])).unwrap();
        assert!(w.approx_eq(&p(&[0.25, 0.25]), 1e-15));
        // a_i < 0 and the coordinate plane alone is feasible
        let c = Component::halfspace_with_nonneg(p(&[1.0, -1.0]), 0.0, 1).unwrap();
        assert_eq!(c.project(&p(&[-0.1, -3.0])).unwrap(), p(&[-0.1, 0.0]));
    }

    #[test]
    fn degenerate_halfspace_with_nonneg() {
        // constraint 2 w_0 <= -1 together with w_0 >= 0 is empty
        let c = Component::halfspace_with_nonneg(p(&[2.0, 0.0]), -1.0, 0).unwrap();
        assert!(matches!(
            c.project(&p(&[1.0, 1.0])),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn sparse_halfspace_projection_stays_sparse() {
        let a = Point::sparse(100, vec![(3, 1.0), (40, -1.0)]).unwrap();
        let h = Component::halfspace(a, -1.0).unwrap();
        let v = Point::sparse(100, vec![(3, 2.0)]).unwrap();
        let w = h.project(&v).unwrap();
        assert!(w.is_sparse());
        assert!(h.contains(&w, 1e-12).unwrap());
        assert_eq!(w.get(3), 0.5);
        assert_eq!(w.get(40), 1.5);
    }
}
