//! Deterministic random streams.
//!
//! Every batch job derives the stream for item `i` from `(seed, i)` alone, so
//! results do not depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

/// The master stream for `seed` (substream 0).
pub fn master(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

/// Independent substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> StreamRng {
    let mut rng = StreamRng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}
