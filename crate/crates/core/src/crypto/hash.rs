//! The toy hash behind the one-time signatures.
//!
//! Definition (all arithmetic on `u64`, wrapping):
//!
//! ```text
//! R(z)       = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!              z ^= z >> 27; z *= 0x94D049BB133111EB;
//!              z ^= z >> 31
//! mix(z, r)  = R applied r times
//!
//! state      = 0x6A09E667F3BCC908 ^ (len * 0x9E3779B97F4A7C15)
//! for each 64-bit input word w_j (bits packed LSB-first, zero padded,
//!                                  at least one word even for len = 0):
//!     state  = mix(state ^ w_j, rounds)
//! out_0      = state
//! out_k      = mix(state ^ (k * 0x9E3779B97F4A7C15), rounds)   for k >= 1
//! ```
//!
//! Output bit `i` is bit `i % 64` of `out_{i / 64}`, for `i < out_bits`.
//! Test vectors live in `tests/fixtures/toy_hash_vectors.txt`.

use crate::bits::BitString;
use crate::seed::{splitmix64, GOLDEN_GAMMA};

pub const HASH_IV: u64 = 0x6A09_E667_F3BC_C908;

#[inline]
pub fn mix(mut z: u64, rounds: u32) -> u64 {
    for _ in 0..rounds {
        z = splitmix64(z);
    }
    z
}

#[inline]
fn initial_state(len: usize) -> u64 {
    HASH_IV ^ (len as u64).wrapping_mul(GOLDEN_GAMMA)
}

pub fn toy_hash(input: &BitString, out_bits: usize, rounds: u32) -> BitString {
    assert!(out_bits >= 1, "toy_hash needs at least one output bit");
    let mut state = initial_state(input.len());
    let words = input.words();
    for j in 0..words.len().max(1) {
        state = mix(state ^ words.get(j).copied().unwrap_or(0), rounds);
    }
    let out_words = (0..out_bits.div_ceil(64))
        .map(|k| {
            if k == 0 {
                state
            } else {
                mix(state ^ (k as u64).wrapping_mul(GOLDEN_GAMMA), rounds)
            }
        })
        .collect();
    BitString::from_words(out_words, out_bits)
}

/// [`toy_hash`] of the `len <= 64` low bits of `value`, truncated to `out_bits <= 64`.
#[inline]
pub fn toy_hash_u64(value: u64, len: usize, out_bits: usize, rounds: u32) -> u64 {
    debug_assert!(len <= 64 && (1..=64).contains(&out_bits));
    let value = if len >= 64 { value } else { value & ((1u64 << len) - 1) };
    let z = mix(initial_state(len) ^ value, rounds);
    if out_bits >= 64 {
        z
    } else {
        z & ((1u64 << out_bits) - 1)
    }
}
