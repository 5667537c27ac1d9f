//! Seeding for simulation replications.
//!
//! Every replication owns a `ChaCha8Rng` seeded from `(base seed, index)`
//! through one SplitMix64 step, so results do not depend on how
//! replications are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seed(seed: u64, replication: usize) -> u64 {
    splitmix64(seed ^ splitmix64(replication as u64))
}

pub fn replication_rng(seed: u64, replication: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(replication_seed(seed, replication))
}
