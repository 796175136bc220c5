//! Seeded random streams. Every replicate owns a ChaCha8 stream whose seed is
//! a SplitMix64 mix of the master seed and the replicate index, so results do
//! not depend on how replicates are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer applied to `master + (index + 1) * golden`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn replicate_rng(master: u64, index: u64) -> SimRng {
    seeded(derive_seed(master, index))
}

/// Runs `f` for replicates `0..n` in parallel on the current rayon pool and
/// returns the results in replicate order.
pub fn par_replicates<T, F>(master: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| f(i, &mut replicate_rng(master, i as u64)))
        .collect()
}
