//! Deterministic RNG substream derivation.
//!
//! Every random decision in the synthetic generator draws from its own
//! ChaCha stream keyed by `(seed, domain, a, b)`. Substreams make the
//! output independent of evaluation order, so callers may parallelize
//! over slices or documents without changing a single byte of output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const DOMAIN_FACTOR_INIT: u64 = 1;
pub(crate) const DOMAIN_FACTOR_CHANGE: u64 = 2;
pub(crate) const DOMAIN_SLICE_DOCS: u64 = 3;
pub(crate) const DOMAIN_DOCUMENT: u64 = 4;

pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(state: u64, v: u64) -> u64 {
    let mut s = state
        .wrapping_add(v.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(0x517C_C1B7_2722_0A95);
    splitmix64(&mut s)
}

pub(crate) fn substream(seed: u64, domain: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut state = mix(mix(mix(seed, domain), a), b);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
