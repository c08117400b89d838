//! Reproducible random streams.
//!
//! Every consumer gets its own ChaCha8 stream keyed by a master seed and a
//! stream id, so results do not depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids used by the experiment harness. Snapshot streams use the
/// snapshot index with the top bit set so they never collide with these.
pub mod streams {
    pub const CIRCUIT: u64 = 1;
    pub const OBSERVABLES: u64 = 2;
    pub const SNAPSHOT_SEED: u64 = 3;
    pub const MONOMIALS: u64 = 4;
}

const SNAPSHOT_STREAM_BIT: u64 = 1 << 63;

pub fn stream(master_seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    rng
}

/// Generator for snapshot `index` of an acquisition run seeded by `master_seed`.
pub fn snapshot_stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    stream(master_seed, SNAPSHOT_STREAM_BIT | index)
}
