//! Distributed random projection for multi-agent constrained convex
//! optimization over time-varying networks.
//!
//! Each agent `i` holds a smooth convex `f_i` and a local feasible set given
//! as an intersection of simple components. One iteration mixes neighbours'
//! iterates with doubly stochastic weights, takes a gradient step on `f_i`
//! and projects onto one (or `b`) randomly sampled components:
//!
//! ```text
//! v_i(k)   = sum_j W_ij(k) x_j(k)
//! x_i(k+1) = P_{X_i^w}[ v_i(k) - alpha_k grad f_i(v_i(k)) ]
//! ```
//!
//! The [`svm`] module casts soft-margin linear SVM training in this form and
//! [`harness`] provides reference solvers, stopping rules and experiment plumbing.

pub mod engine;
mod error;
pub mod geometry;
pub mod harness;
pub mod network;
pub mod objectives;
pub mod svm;

pub use error::{Error, Result};
