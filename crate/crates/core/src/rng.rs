//! Reproducible randomness, pinned by algorithm rather than library default.
//!
//! * Generator: xoshiro256++ whose 256-bit state is four consecutive
//!   SplitMix64 outputs of the 64-bit seed (little-endian words).
//! * Bounded integers: Lemire's multiply-shift with rejection, one 64-bit
//!   draw per attempt.
//! * Seed derivation: `h = mix64(base)`, then for every part `p`,
//!   `h = mix64(h ^ mix64(p + GAMMA))`, where `mix64` is the SplitMix64
//!   finalizer and `GAMMA = 0x9E3779B97F4A7C15`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(base), |h, &p| mix64(h ^ mix64(p.wrapping_add(GAMMA))))
}

pub type Rng = Xoshiro256PlusPlus;

pub fn rng_from_seed(seed: u64) -> Rng {
    let mut state = seed;
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_exact_mut(8) {
        state = state.wrapping_add(GAMMA);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    Xoshiro256PlusPlus::from_seed(bytes)
}

/// Uniform integer in `[0, bound)`. Panics if `bound == 0`.
pub fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    let mut m = u128::from(rng.next_u64()) * u128::from(bound);
    if (m as u64) < bound {
        let threshold = bound.wrapping_neg() % bound;
        while (m as u64) < threshold {
            m = u128::from(rng.next_u64()) * u128::from(bound);
        }
    }
    (m >> 64) as u64
}
