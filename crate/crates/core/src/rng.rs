//! Reproducible random streams.
//!
//! Sample `i` of an experiment with base seed `s` always draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`, independent of how
//! samples are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

/// Generator for sample `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
