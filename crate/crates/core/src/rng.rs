//! Seeded random streams.
//!
//! Every generator takes a 64-bit seed. Independent components of one run
//! draw from separate ChaCha streams of the same seed, so switching one
//! component off does not shift the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream used by the main protocol of a simulation.
pub const MAIN_STREAM: u64 = 0;
/// Stream used by speculative expectation formation.
pub const SPECULATION_STREAM: u64 = 1;
/// Stream used by the news regime process.
pub const NEWS_STREAM: u64 = 2;

/// First stream of the per-path streams used by Monte Carlo checks.
pub const PATH_STREAM_BASE: u64 = 1 << 32;

pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream of the `path`-th Monte Carlo path, independent of the others so
/// paths can be evaluated in any order.
pub fn path_stream(seed: u64, path: u64) -> SimRng {
    stream(seed, PATH_STREAM_BASE + path)
}
