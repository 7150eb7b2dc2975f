//! Deterministic RNG stream derivation. Every randomized stage derives its
//! own ChaCha stream from (base seed, stream index), so parallel and serial
//! execution consume identical randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates nearby (seed, stream) pairs.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Independent stream `stream` of the base seed.
pub fn derive_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(stream)))
}

/// Named sub-streams used across the pipeline.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Scene = 1,
    MeshPlacement = 2,
    Problem = 3,
    Planner = 4,
    Observation = 5,
    Rollout = 6,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    derive_rng(seed, stream as u64)
}
