//! Test support for the vocrel workspace: seeded random instances, a
//! synthetic benchmark dataset, and brute-force oracles that stay independent
//! of the production code paths they check.

pub mod gen;
pub mod oracle;
pub mod synth;

pub use rand_chacha::ChaCha12Rng;

use rand_chacha::rand_core::SeedableRng;

/// The one way tests create RNGs: everything downstream of a seed is
/// reproducible.
pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}
