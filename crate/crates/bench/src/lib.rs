//! Seeded inputs shared by the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uqscore_core::fuzz::random_sample;
use uqscore_core::SecondOrderSample;

pub fn samples(n: usize, k: usize, m: usize, seed: u64) -> Vec<SecondOrderSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_sample(&mut rng, k, m)).collect()
}

pub fn uniform(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random()).collect()
}
