//! Seed expansion and the sampling primitives every randomized mechanism uses.
//!
//! The expansion is part of the reproducibility contract: a master seed `s`
//! and a trial index `t` select the ChaCha8 stream
//! `ChaCha8Rng::seed_from_u64(s)` with `set_stream(t)`. All draws are
//! taken from `next_u64` and reduced with [`SeedRng::below`] (rejection
//! sampling), so results do not depend on the version of any distribution
//! crate.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Deterministic random source derived from a `(seed, stream)` pair.
#[derive(Debug, Clone)]
pub struct SeedRng {
    inner: ChaCha8Rng,
}

impl SeedRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeedRng { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`. Panics if `bound == 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // 2^64 - threshold is a multiple of bound
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % bound;
            }
        }
    }

    pub fn below_usize(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    /// Uniform `size`-subset of `0..n`, returned sorted (Floyd's algorithm).
    pub fn subset(&mut self, n: usize, size: usize) -> Vec<usize> {
        assert!(size <= n, "subset larger than ground set");
        let mut chosen: Vec<usize> = Vec::with_capacity(size);
        for j in n - size..n {
            let t = self.below_usize(j + 1);
            match chosen.binary_search(&t) {
                Ok(_) => {
                    let pos = chosen.binary_search(&j).unwrap_err();
                    chosen.insert(pos, j);
                }
                Err(pos) => chosen.insert(pos, t),
            }
        }
        chosen
    }
}
