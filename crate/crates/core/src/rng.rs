//! Seeded randomness shared by fault injection, splitting and data generation.
//!
//! Every stochastic step draws from a xoshiro256++ stream seeded through
//! SplitMix64, so a `(input, seed)` pair fixes the output on every platform.
//! Each stage jumps to its own subsequence, so reusing one seed for
//! generation, injection and splitting does not correlate them.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type SeededRng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> SeededRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Stage that owns a subsequence of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Synthetic = 0,
    Fault = 1,
    Split = 2,
}

/// `seeded(seed)` advanced by `stream` jumps of 2^128 draws.
pub fn stream(seed: u64, stream: Stream) -> SeededRng {
    let mut rng = seeded(seed);
    for _ in 0..stream as u8 {
        rng.jump();
    }
    rng
}

/// In-place Fisher-Yates shuffle (Durstenfeld, descending index).
pub fn fisher_yates<T>(items: &mut [T], rng: &mut SeededRng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

/// A uniformly random permutation of `0..n`.
pub fn permutation(n: usize, rng: &mut SeededRng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    fisher_yates(&mut idx, rng);
    idx
}
