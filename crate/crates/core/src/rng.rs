//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! master seed and selected by a 64-bit stream number. Replicate `r` of any
//! experiment reads stream `r`, so the result of a replicate does not depend
//! on which worker ran it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the pinned generator, echoed into run manifests.
pub const GENERATOR: &str = "rand_chacha::ChaCha8Rng(seed_from_u64(master), stream=replicate)";

/// Stream reserved for bootstrap resampling.
pub const BOOTSTRAP_STREAM: u64 = u64::MAX - 1;

pub type Stream = ChaCha8Rng;

pub fn stream(master_seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Derive an independent master seed for a labelled sub-experiment
/// (SplitMix64 finaliser over seed and label).
pub fn derive_seed(master_seed: u64, label: u64) -> u64 {
    let mut z = master_seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
