//! Seed derivation. Every random draw comes from a ChaCha8 generator keyed by
//! (seed, index) and placed on a purpose-specific stream, so adding draws for
//! one purpose never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Sampling = 1,
    Kraus = 2,
    Readout = 3,
    Optimizer = 4,
    Resample = 5,
    Restart = 6,
    Candidates = 7,
    Objective = 8,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Child seed for a numbered sub-task.
pub fn derive(seed: u64, index: u64) -> u64 {
    splitmix(seed ^ splitmix(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(derive(seed, index));
    r.set_stream(stream as u64);
    r
}

/// Seed for the `index`-th task of a given purpose, e.g. the n-th objective
/// evaluation of an optimizer run.
pub fn task_seed(seed: u64, stream: Stream, index: u64) -> u64 {
    derive(derive(seed, 0x1000 + stream as u64), index)
}
