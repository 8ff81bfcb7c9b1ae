//! Seedable, counter-based random streams.
//!
//! Every trajectory draws from its own ChaCha8 stream keyed by the master
//! seed and selected by the trajectory index, so results do not depend on
//! how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The stream for trajectory `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
