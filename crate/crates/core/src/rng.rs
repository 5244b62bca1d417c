//! Counter-based random streams.
//!
//! Every Monte Carlo trial owns a ChaCha8 stream selected by
//! `(master_seed, domain, index)`, so results never depend on how trials
//! are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domains separate unrelated consumers of the same master seed.
pub mod domain {
    pub const TRIALS: u64 = 0x7472_6961;
    pub const START: u64 = 0x7374_6172;
    pub const SEARCH: u64 = 0x7365_6172;
    pub const CLOUD: u64 = 0x636c_6f75;
    pub const PAIRS: u64 = 0x7061_6972;
    pub const FLAGS: u64 = 0x666c_6167;
    pub const SMOOTH: u64 = 0x736d_6f6f;
    pub const AUX: u64 = 0x6175_7800;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for `index` within `domain`.
pub fn stream(master_seed: u64, domain: u64, index: u64) -> StreamRng {
    let key = splitmix64(master_seed ^ splitmix64(domain));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Derive a child master seed (used when one experiment runs several
/// estimators that must not share random numbers).
pub fn derive_seed(master_seed: u64, tag: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(splitmix64(tag)))
}
