//! Reproducible randomness.
//!
//! Every simulator and randomized procedure in this crate draws from
//! [`SeededRng`], which is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Independent consumers of one user seed are
//! separated by ChaCha stream ids, so a given `(seed, stream)` pair always
//! yields the same bit stream regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Stream labels for components that derive generators from one seed.
pub mod stream {
    pub const MARKOV: u64 = 1;
    pub const SERIES: u64 = 2;
    pub const AXIOMS: u64 = 3;
    /// Surrogate `i` uses stream `SURROGATE_BASE + i`.
    pub const SURROGATE_BASE: u64 = 1 << 32;
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_for_stream(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
