//! Seeded point sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform points in a box, deterministic for a fixed seed.
pub fn sample_box_points(sample_box: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            sample_box
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..hi))
                .collect()
        })
        .collect()
}
