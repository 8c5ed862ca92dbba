use nalgebra::DMatrix;

use super::WeightMatrix;
use crate::error::{Error, Result};

/// `Phi(k, s) = W(k) W(k-1) ... W(s)`, with `Phi(k, k) = W(k)`.
pub fn transition_product(weights: &[WeightMatrix], k: usize, s: usize) -> Result<DMatrix<f64>> {
    if s > k {
        return Err(Error::InvalidArgument(format!("need k >= s, got k={k}, s={s}")));
    }
    if k >= weights.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: weights.len(),
        });
    }
    let mut phi = weights[s].matrix().clone();
    for w in &weights[s + 1..=k] {
        phi = w.matrix() * phi;
    }
    Ok(phi)
}

/// Largest entrywise deviation of `phi` from `1/m`.
pub fn max_deviation_from_average(phi: &DMatrix<f64>) -> f64 {
    let target = 1.0 / phi.nrows() as f64;
    phi.iter().fold(0.0, |m, &x| m.max((x - target).abs()))
}

/// Constants `(theta, beta)` of the geometric bound
/// `|[Phi(k,s)]_ij - 1/m| <= theta * beta^(k-s)` for doubly stochastic,
/// `q`-connected weights with minimum edge weight `eta`.
pub fn geometric_mixing_bound(eta: f64, agents: usize, q: usize) -> (f64, f64) {
    let base = 1.0 - eta / (4.0 * (agents * agents) as f64);
    (base.powi(-2), base.powf(1.0 / q as f64))
}

/// `sum_{l=0}^{k} beta^(k-l) gamma(l)` at the last index `k = gamma.len() - 1`.
pub fn convolution_limit_check(beta: f64, gamma: &[f64]) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0,1), got {beta}")));
    }
    Ok(gamma.iter().fold(0.0, |acc, g| beta * acc + g))
}
