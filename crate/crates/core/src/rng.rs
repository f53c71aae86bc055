//! Seeded generators for reproducible chains.
//!
//! Every chain uses ChaCha8 from `rand_chacha`. Parallel chain `i` started
//! from master seed `s` is seeded with `s ^ i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ChainRng = ChaCha8Rng;

/// Name and version of the generator, recorded in run manifests.
pub const RNG_NAME: &str = "rand_chacha::ChaCha8Rng (rand_chacha 0.9)";

pub fn chain_rng(seed: u64) -> ChainRng {
    ChainRng::seed_from_u64(seed)
}

/// Seed for parallel chain `index` under `master`.
pub fn split_seed(master: u64, index: u64) -> u64 {
    master ^ index
}
