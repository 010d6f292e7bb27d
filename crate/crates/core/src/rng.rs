//! Deterministic splitmix64 random source.
//!
//! Every random decision in the crate (bootstrap draws, shuffles, per-node
//! feature sampling, synthetic data) flows through [`SeededRng`], so a seed
//! fully determines every result on every platform.

use rand_core::RngCore;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Single-owner splitmix64 state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeededRng {
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[a, b]` by modulo reduction.
    pub fn random_integer(&mut self, a: i64, b: i64) -> Result<i64> {
        if a > b {
            return Err(Error::InvalidArgument(format!(
                "random_integer: empty range [{a}, {b}]"
            )));
        }
        let span = (b as i128 - a as i128 + 1) as u128;
        let draw = self.next_u64() as u128;
        if span > u64::MAX as u128 {
            return Ok(draw as i64);
        }
        Ok((a as i128 + (draw % span) as i128) as i64)
    }

    /// Uniform index in `[0, n)`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index: empty range");
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform real in `[0, 1)` with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Independent stream for sub-task `i`: seeded with the splitmix64 output
    /// of `state + i`. Does not advance `self`.
    pub fn derive(&self, i: u64) -> SeededRng {
        let mut tmp = SeededRng::new(self.state.wrapping_add(i));
        SeededRng::new(tmp.next_u64())
    }

    /// In-place Fisher-Yates shuffle driven by [`SeededRng::index`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }

    /// `k` distinct elements of `pool` without replacement (partial
    /// Fisher-Yates). Order of the result is draw order.
    pub fn sample_without_replacement<T: Copy>(&mut self, pool: &[T], k: usize) -> Vec<T> {
        let mut pool = pool.to_vec();
        let k = k.min(pool.len());
        for i in 0..k {
            let j = i + self.index(pool.len() - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        (SeededRng::next_u64(self) >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        SeededRng::next_u64(self)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = SeededRng::next_u64(self).to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
