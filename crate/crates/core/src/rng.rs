//! Seeded random streams.
//!
//! A stream is a ChaCha8 keystream selected by `(seed, index)`. ChaCha is
//! counter based, so substreams with distinct indices are independent and a
//! given `(seed, index)` always replays the same draws regardless of which
//! thread consumes it.

use num_bigint::{BigUint, RandBigInt};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_index(seed, 0)
    }

    fn with_index(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        RngStream { seed, index, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Fresh stream for the same seed; independent of `self` when `index`
    /// differs from `self.index()`.
    pub fn substream(&self, index: u64) -> RngStream {
        Self::with_index(self.seed, index)
    }

    /// Uniform in `0..m`. Panics if `m == 0`.
    pub fn below(&mut self, m: usize) -> usize {
        self.inner.gen_range(0..m)
    }

    /// Uniform in `1..=m`. Panics if `m == 0`.
    pub fn one_to(&mut self, m: usize) -> usize {
        self.inner.gen_range(1..=m)
    }

    pub fn below_big(&mut self, bound: &BigUint) -> BigUint {
        self.inner.gen_biguint_below(bound)
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> Option<&'a T> {
        if items.is_empty() {
            None
        } else {
            Some(&items[self.below(items.len())])
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
