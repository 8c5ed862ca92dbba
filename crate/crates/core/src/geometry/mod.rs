//! Points, simple convex sets and their Euclidean projections.

mod component;
mod intersection;
mod point;

pub use component::{Component, ComponentKind, PROJECTION_TOL};
pub use intersection::{IntersectionProjection, IntersectionSet, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
pub use point::{Point, SparseVec};
