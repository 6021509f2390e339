//! Hierarchical seed derivation.
//!
//! Every random stream in a campaign is derived from the master seed by
//! repeatedly mixing in an index: run, evaluation, replication, session.
//! Streams are therefore independent of scheduling order and of which
//! algorithm consumes them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tag for an optimizer's own decisions (as opposed to the simulator).
pub const OPTIMIZER_STREAM: u64 = 0x6f70_7469_6d69_7a65;
/// Stream tag for objective evaluations within a run.
pub const EVALUATION_STREAM: u64 = 0x6576_616c_7561_7465;
/// Stream tag for post-hoc QoS re-simulation of reported configurations.
pub const QOS_STREAM: u64 = 0x716f_735f_7265_706c;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the child seed at `index` under `parent`.
pub fn derive(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
