use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{parse_dataset_from, Dataset, Example};
use crate::error::Result;
use crate::geometry::Point;

/// Seed of the bundled 200-point separable set.
pub const BUNDLED_SEED: u64 = 20_130_101;
pub const BUNDLED_SIZE: usize = 200;

const BUNDLED_BLOBS: &str = include_str!("../../data/blobs200.svm");

// class means sit at MIDPOINT +- SHIFT (1, 1)
const MIDPOINT: [f64; 2] = [1.0, -1.0];
pub const DEFAULT_SHIFT: f64 = 1.0;
pub const DEFAULT_MARGIN: f64 = 0.1;

/// Two 2-D Gaussian blobs with alternating labels. Points closer than
/// `DEFAULT_MARGIN` to the separating line are redrawn, so the set is linearly
/// separable before `flip_fraction * n` labels are flipped.
pub fn gaussian_blobs(n: usize, seed: u64, flip_fraction: f64) -> Result<Dataset> {
    gaussian_blobs_with(n, seed, flip_fraction, DEFAULT_SHIFT, DEFAULT_MARGIN)
}

/// [`gaussian_blobs`] with class means at `(1, -1) +- shift (1, 1)` and
/// points within `margin` of the separating line redrawn.
pub fn gaussian_blobs_with(n: usize, seed: u64, flip_fraction: f64, shift: f64, margin: f64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let u = std::f64::consts::FRAC_1_SQRT_2;
    let mut examples = Vec::with_capacity(n);
    for j in 0..n {
        let label = if j % 2 == 0 { 1.0 } else { -1.0 };
        let point = loop {
            let p = [
                MIDPOINT[0] + label * shift + noise.sample(&mut rng),
                MIDPOINT[1] + label * shift + noise.sample(&mut rng),
            ];
            let side = label * ((p[0] - MIDPOINT[0]) * u + (p[1] - MIDPOINT[1]) * u);
            if side >= margin {
                break p;
            }
        };
        examples.push(Example {
            features: Point::sparse(2, vec![(0, point[0]), (1, point[1])])?,
            label,
        });
    }
    let flips = ((n as f64) * flip_fraction).floor() as usize;
    for j in sample(&mut rng, n, flips.min(n)) {
        examples[j].label = -examples[j].label;
    }
    Dataset::new(examples, 2)
}

/// The 200-point separable set shipped with the crate.
pub fn bundled_blobs() -> Dataset {
    parse_dataset_from(BUNDLED_BLOBS.as_bytes(), "data/blobs200.svm").expect("bundled dataset parses")
}
