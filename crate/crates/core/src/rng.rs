//! Deterministic random-number substreams.
//!
//! A single master seed fans out into independent ChaCha streams keyed by
//! integer labels (replicate index, sample tag, ...). Streams never depend
//! on the order in which they are created.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag for draws that belong to sample A.
pub const TAG_A: u64 = 0;
/// Stream tag for draws that belong to sample B.
pub const TAG_B: u64 = 1;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a path of labels into a new 64-bit seed.
pub fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(seed), |acc, &l| splitmix64(acc ^ splitmix64(l)))
}

/// Generator for the substream identified by `(seed, labels)`.
pub fn substream(seed: u64, labels: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, labels))
}
