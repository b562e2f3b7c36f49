//! Counter-based seed derivation.
//!
//! Every random stream in the crate is keyed by a base seed plus a path of
//! counters (replication index, column index, purpose tag). Deriving a child
//! seed is a pure function of that path, so results never depend on which
//! worker thread evaluates a task or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Purpose tags for independent streams inside one replication.
pub mod tag {
    pub const DESIGN: u64 = 0x4445_5349_474e;
    pub const NOISE: u64 = 0x004e_4f49_5345;
    pub const TIES: u64 = 0x5449_4553;
    pub const UNIFORM: u64 = 0x554e_4946;
    pub const FOLDS: u64 = 0x464f_4c44;
    pub const REFERENCE: u64 = 0x5245_4646;
}

/// The RNG used throughout the crate.
pub type StreamRng = ChaCha12Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `base` and a path of counters.
pub fn derive(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

/// An RNG seeded from `derive(base, path)`.
pub fn rng(base: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive(base, path))
}
