//! Seed derivation.
//!
//! Every random stream is keyed by `(root seed, stream label, index)` so
//! that the order in which workers run cannot change any draw.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream labels used across the crate.
pub mod stream {
    pub const SYNTH_GRAPH: u64 = 1;
    pub const SYNTH_TEXT: u64 = 2;
    pub const SYNTH_EMBED: u64 = 3;
    pub const NEG_HARD: u64 = 10;
    pub const NEG_RANDOM: u64 = 11;
    pub const SPLIT: u64 = 20;
    pub const INIT_PARAMS: u64 = 30;
    pub const INIT_EMBED: u64 = 31;
    pub const SHUFFLE: u64 = 40;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a root seed, a stream label and a counter.
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(root) ^ stream) ^ index)
}

pub fn rng_for(root: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, stream, index))
}
