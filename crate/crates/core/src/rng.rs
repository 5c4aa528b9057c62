//! Deterministic random streams.
//!
//! Every stochastic step draws from its own ChaCha stream keyed by the run
//! seed and a tag path (phase, generation, index), so results never depend
//! on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub(crate) const TAG_INIT: u64 = 1;
pub(crate) const TAG_OFFSPRING: u64 = 2;
pub(crate) const TAG_SELECTION: u64 = 3;
pub(crate) const TAG_MUTATION: u64 = 4;
pub(crate) const TAG_GENERATOR: u64 = 5;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a path of tags into a single 64-bit stream key.
pub fn stream_key(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Opens the stream identified by `(seed, tags)`.
pub fn stream(seed: u64, tags: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(stream_key(seed, tags))
}
