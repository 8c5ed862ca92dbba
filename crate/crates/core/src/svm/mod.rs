//! Distributed soft-margin linear SVM built on two-halfspace components.

mod dataset;
mod problem;
mod synthetic;

pub use dataset::{parse_dataset, parse_dataset_from, Dataset, Example};
pub use problem::{accuracy, build_problem, partition, SvmProblem, DEFAULT_C};
pub use synthetic::{
    bundled_blobs, gaussian_blobs, gaussian_blobs_with, BUNDLED_SEED, BUNDLED_SIZE, DEFAULT_MARGIN, DEFAULT_SHIFT,
};
