//! Deterministic stream derivation: one master seed fans out into
//! non-overlapping per-task streams via a splittable counter construction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; full-period, well-mixed 64-bit permutation step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `(master, a, b)` into one 64-bit stream seed. Used as
/// `derive_seed(masterSeed, n, trialIndex)` for experiment fan-out and
/// `derive_seed(runSeed, workerIndex, 0)` inside the async executor.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    let mut s = splitmix64(master);
    s = splitmix64(s ^ a);
    splitmix64(s ^ b)
}

/// A counter-based, reproducible stream for one task.
pub fn stream(master: u64, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, a, b))
}
