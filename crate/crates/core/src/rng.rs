//! Seed derivation. Every random stream in the crate is a ChaCha8 stream whose
//! seed is a mix of the master seed, a domain tag and an index, so streams can
//! be created independently on any thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Domain tags keep streams for different purposes disjoint.
pub mod domain {
    pub const NODE_ACTIVITY: u64 = 0x6e6f_6465;
    pub const SOCIAL: u64 = 0x736f_6369;
    pub const ADN: u64 = 0x0061_646e;
    pub const DENSIFY: u64 = 0x6465_6e73;
    pub const SIR_RUN: u64 = 0x0073_6972;
    pub const SIR_NODE_DAY: u64 = 0x6e64_6179;
    pub const SUBSAMPLE: u64 = 0x7375_6273;
    pub const TEMPORAL: u64 = 0x7465_6d70;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a sequence of words into one seed.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &w in words {
        h = splitmix64(h ^ splitmix64(w));
    }
    h
}

pub fn stream(master: u64, words: &[u64]) -> Stream {
    Stream::seed_from_u64(derive_seed(master, words))
}
