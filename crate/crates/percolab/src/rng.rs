//! Deterministic randomness.
//!
//! Every random decision in this crate flows through [`Rng64`], a thin wrapper
//! around xoshiro256++ seeded via the standard SplitMix64 expansion. The
//! wrapper pins down the exact draw semantics (unit doubles from the top 53
//! bits, bounded integers by widening multiply) so that a seed identifies one
//! bit stream on every platform.
//!
//! Independent streams are derived with [`mix`]: each consumer mixes the base
//! seed with a stream tag and a trial index instead of sharing a generator.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Stream tag for single percolation masks.
pub const STREAM_MASK: u64 = 1;
/// Stream tags for the two coupled masks of a sprinkling run.
pub const STREAM_MASK_FIRST: u64 = 2;
pub const STREAM_MASK_SECOND: u64 = 3;
/// Stream tag for branching-process cluster samples.
pub const STREAM_GW: u64 = 4;
/// Stream tag for exploration answer bits and start vertices.
pub const STREAM_EXPLORE: u64 = 5;
/// Stream tag for graph generation.
pub const STREAM_GEN: u64 = 6;

/// One SplitMix64 step: advance by the golden-ratio increment, then finalize.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed for one (stream, index) cell from a base seed.
pub fn mix(base: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index)
}

pub struct Rng64 {
    inner: Xoshiro256PlusPlus,
}

impl Rng64 {
    pub fn from_seed(seed: u64) -> Self {
        Rng64 {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform double in [0, 1), 53 bits of precision.
    #[inline]
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Bernoulli(p) trial. Consumes exactly one `next_u64` draw.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    /// Uniform integer in [0, bound) by Lemire's widening-multiply rejection.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0)");
        let mut x = self.next_u64();
        let mut m = (x as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Fisher-Yates shuffle, iterating from the back.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}
