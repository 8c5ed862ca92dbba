use std::fmt;

use crate::error::{ensure_dim, Error, Result};

/// Index/value storage for a vector with few nonzeros. Indices are sorted and unique.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVec {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    fn get(&self, i: usize) -> f64 {
        match self.indices.binary_search(&i) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    fn set(&mut self, i: usize, value: f64) {
        match self.indices.binary_search(&i) {
            Ok(pos) => self.values[pos] = value,
            Err(pos) => {
                self.indices.insert(pos, i);
                self.values.insert(pos, value);
            }
        }
    }

    fn merge_scaled(&self, alpha: f64, other: &SparseVec) -> SparseVec {
        let mut indices = Vec::with_capacity(self.indices.len() + other.indices.len());
        let mut values = Vec::with_capacity(indices.capacity());
        let (mut a, mut b) = (0, 0);
        while a < self.indices.len() || b < other.indices.len() {
            let ia = self.indices.get(a).copied().unwrap_or(usize::MAX);
            let ib = other.indices.get(b).copied().unwrap_or(usize::MAX);
            if ia < ib {
                indices.push(ia);
                values.push(self.values[a]);
                a += 1;
            } else if ib < ia {
                indices.push(ib);
                values.push(alpha * other.values[b]);
                b += 1;
            } else {
                indices.push(ia);
                values.push(self.values[a] + alpha * other.values[b]);
                a += 1;
                b += 1;
            }
        }
        SparseVec {
            dim: self.dim,
            indices,
            values,
        }
    }
}

/// A real vector in R^d, stored densely or as index/value pairs.
///
/// Equality is mathematical: a sparse and a dense point holding the same
/// coordinates compare equal.
#[derive(Clone, Debug)]
pub enum Point {
    Dense(Vec<f64>),
    Sparse(SparseVec),
}

impl Point {
    pub fn dense(coords: Vec<f64>) -> Self {
        Point::Dense(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point::Dense(vec![0.0; dim])
    }

    /// Builds a sparse point; duplicate indices are summed.
    pub fn sparse(dim: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(i, _)| i);
        let mut indices: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, len: dim });
            }
            if indices.last() == Some(&i) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(i);
                values.push(v);
            }
        }
        Ok(Point::Sparse(SparseVec {
            dim,
            indices,
            values,
        }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Point::Dense(v) => v.len(),
            Point::Sparse(s) => s.dim,
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Point::Sparse(_))
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        match self {
            Point::Dense(v) => v.len(),
            Point::Sparse(s) => s.indices.len(),
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            Point::Dense(v) => v[i],
            Point::Sparse(s) => s.get(i),
        }
    }

    pub fn set(&mut self, i: usize, value: f64) {
        match self {
            Point::Dense(v) => v[i] = value,
            Point::Sparse(s) => s.set(i, value),
        }
    }

    /// Stored entries as `(index, value)` pairs in increasing index order.
    pub fn entries(&self) -> Box<dyn Iterator<Item = (usize, f64)> + '_> {
        match self {
            Point::Dense(v) => Box::new(v.iter().copied().enumerate()),
            Point::Sparse(s) => Box::new(s.iter()),
        }
    }

    pub fn as_dense(&self) -> Option<&[f64]> {
        match self {
            Point::Dense(v) => Some(v),
            Point::Sparse(_) => None,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Point::Dense(v) => v.clone(),
            Point::Sparse(s) => {
                let mut out = vec![0.0; s.dim];
                for (i, v) in s.iter() {
                    out[i] = v;
                }
                out
            }
        }
    }

    pub fn into_dense(self) -> Vec<f64> {
        match self {
            Point::Dense(v) => v,
            sparse => sparse.to_dense(),
        }
    }

    pub fn densify(&mut self) {
        if let Point::Sparse(_) = self {
            *self = Point::Dense(self.to_dense());
        }
    }

    pub fn dot(&self, other: &Point) -> Result<f64> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(match (self, other) {
            (Point::Dense(a), Point::Dense(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            (Point::Dense(d), Point::Sparse(s)) | (Point::Sparse(s), Point::Dense(d)) => {
                s.iter().map(|(i, v)| v * d[i]).sum()
            }
            (Point::Sparse(a), Point::Sparse(b)) => {
                let (mut i, mut j, mut acc) = (0, 0, 0.0);
                while i < a.indices.len() && j < b.indices.len() {
                    match a.indices[i].cmp(&b.indices[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            acc += a.values[i] * b.values[j];
                            i += 1;
                            j += 1;
                        }
                    }
                }
                acc
            }
        })
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            Point::Dense(v) => v.iter().map(|x| x * x).sum(),
            Point::Sparse(s) => s.values.iter().map(|x| x * x).sum(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `self += alpha * x`. A sparse `self` stays sparse only when `x` is sparse.
    pub fn axpy(&mut self, alpha: f64, x: &Point) -> Result<()> {
        ensure_dim(self.dim(), x.dim())?;
        match (&mut *self, x) {
            (Point::Dense(a), Point::Dense(b)) => {
                for (ai, bi) in a.iter_mut().zip(b) {
                    *ai += alpha * bi;
                }
            }
            (Point::Dense(a), Point::Sparse(s)) => {
                for (i, v) in s.iter() {
                    a[i] += alpha * v;
                }
            }
            (Point::Sparse(a), Point::Sparse(b)) => {
                *a = a.merge_scaled(alpha, b);
            }
            (Point::Sparse(_), Point::Dense(_)) => {
                self.densify();
                return self.axpy(alpha, x);
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        match self {
            Point::Dense(v) => v.iter_mut().for_each(|x| *x *= factor),
            Point::Sparse(s) => s.values.iter_mut().for_each(|x| *x *= factor),
        }
    }

    pub fn sub(&self, other: &Point) -> Result<Point> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn distance_sq(&self, other: &Point) -> Result<f64> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(match (self, other) {
            (Point::Dense(a), Point::Dense(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
            }
            _ => self.sub(other)?.norm_sq(),
        })
    }

    pub fn distance(&self, other: &Point) -> Result<f64> {
        Ok(self.distance_sq(other)?.sqrt())
    }

    pub fn max_abs_diff(&self, other: &Point) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.entries().fold(0.0, |m, (_, v)| m.max(v.abs())))
    }

    pub fn approx_eq(&self, other: &Point, tol: f64) -> bool {
        self.dim() == other.dim() && self.distance(other).map_or(false, |d| d <= tol)
    }

    pub fn all_finite(&self) -> bool {
        self.entries().all(|(_, v)| v.is_finite())
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        match (self, other) {
            (Point::Dense(a), Point::Dense(b)) => a == b,
            _ => (0..self.dim()).all(|i| self.get(i) == other.get(i)),
        }
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::Dense(v)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (n, v) in self.to_dense().iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_and_dense_compare_equal() {
        let d = Point::dense(vec![0.0, 1.5, 0.0, -2.0]);
        let s = Point::sparse(4, vec![(3, -2.0), (1, 1.5)]).unwrap();
        assert_eq!(d, s);
        assert_eq!(d.distance(&s).unwrap(), 0.0);
        assert_eq!(s.norm_sq(), 6.25);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = Point::zeros(3);
        let b = Point::zeros(2);
        assert!(matches!(
            a.dot(&b),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
        let mut c = a.clone();
        assert!(c.axpy(1.0, &b).is_err());
    }

    #[test]
    fn sparse_axpy_stays_sparse() {
        let mut a = Point::sparse(10, vec![(1, 1.0), (5, 2.0)]).unwrap();
        let b = Point::sparse(10, vec![(5, 1.0), (7, 3.0)]).unwrap();
        a.axpy(-2.0, &b).unwrap();
        assert!(a.is_sparse());
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(5), 0.0);
        assert_eq!(a.get(7), -6.0);

        a.axpy(1.0, &Point::dense(vec![1.0; 10])).unwrap();
        assert!(!a.is_sparse());
        assert_eq!(a.get(7), -5.0);
    }

    #[test]
    fn duplicate_sparse_indices_are_summed() {
        let p = Point::sparse(3, vec![(2, 1.0), (2, 0.5)]).unwrap();
        assert_eq!(p.get(2), 1.5);
        assert!(Point::sparse(3, vec![(3, 1.0)]).is_err());
    }
}
