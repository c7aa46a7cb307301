//! Seeded random streams.
//!
//! Every random decision in the library draws from a ChaCha8 generator keyed
//! by a user seed plus a stream id, so parallel work items (Monte Carlo
//! trials, dataset components) each own an independent, reproducible stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
