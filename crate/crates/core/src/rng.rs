//! Reproducible random streams.
//!
//! Every chain or replicate draws from its own ChaCha20 stream: the master
//! seed fixes the key and the work-unit index selects the stream, so results
//! do not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type ChainRng = ChaCha20Rng;

pub fn stream_rng(master_seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Seed for a nested work unit, e.g. the chain for model `m` inside
/// replicate `r`.
pub fn child_seed(master_seed: u64, stream: u64) -> u64 {
    use rand::Rng;
    stream_rng(master_seed, stream).random()
}
