//! Seed derivation and the handful of random draws shared by the experiments.
//!
//! Every random quantity is drawn from a `ChaCha8Rng` whose seed is derived
//! from a master seed and a list of counters, so results never depend on the
//! order in which independent work items are evaluated.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type LabRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Mixes a master seed with an ordered list of counters into a child seed.
pub fn derive_seed(master: u64, counters: &[u64]) -> u64 {
    counters
        .iter()
        .fold(splitmix64(master), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

pub fn rng_from(master: u64, counters: &[u64]) -> LabRng {
    LabRng::seed_from_u64(derive_seed(master, counters))
}

pub fn gaussian_vector(rng: &mut impl Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

/// Column-major fill, so a given seed always yields the same matrix.
pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn rademacher_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 })
}

/// Uniform direction on the unit sphere (normalized Gaussian draw).
pub fn unit_vector(rng: &mut impl Rng, len: usize) -> DVector<f64> {
    loop {
        let g = gaussian_vector(rng, len);
        let norm = g.norm();
        if norm > 1e-300 {
            return g / norm;
        }
    }
}

/// Uniformly random `size`-subset of `0..len`, sorted.
pub fn random_subset(rng: &mut impl Rng, len: usize, size: usize) -> Vec<usize> {
    let mut idx = index::sample(rng, len, size).into_vec();
    idx.sort_unstable();
    idx
}
