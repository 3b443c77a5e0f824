//! Counter-based deterministic random numbers.
//!
//! Every draw is a pure function of `(seed, stream, index)`, so harness
//! outputs cannot depend on evaluation order or thread count.

use crate::fx;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline(always)]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A keyed counter: `value(i)` is independent of every other index.
#[derive(Debug, Clone, Copy)]
pub struct Counter {
    key: u64,
}

impl Counter {
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = splitmix64(splitmix64(seed) ^ stream.wrapping_mul(GAMMA));
        Counter { key }
    }

    #[inline(always)]
    pub fn value(&self, index: u64) -> u64 {
        splitmix64(self.key ^ index.wrapping_mul(0xD605_BBB5_8C8A_BC2D).wrapping_add(index))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    #[inline(always)]
    pub fn uniform(&self, index: u64) -> f64 {
        (self.value(index) >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in `[lo, hi)`.
    #[inline(always)]
    pub fn uniform_in(&self, index: u64, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform(index)
    }

    /// Standard normal via Box-Muller on indices `2 index` and `2 index + 1`.
    pub fn normal(&self, index: u64) -> f64 {
        let u1 = self.uniform(2 * index).max(1e-300);
        let u2 = self.uniform(2 * index + 1);
        fx::sqrt(-2.0 * fx::ln(u1)) * fx::cos(core::f64::consts::TAU * u2)
    }

    /// Exponential with the given rate, shifted to start at `lo`.
    pub fn shifted_exp(&self, index: u64, rate: f64, lo: f64) -> f64 {
        let u = self.uniform(index).max(1e-300);
        lo - fx::ln(u) / rate
    }

    /// Uniform integer in `[0, m)`.
    pub fn below(&self, index: u64, m: u64) -> u64 {
        debug_assert!(m > 0);
        self.value(index) % m
    }
}

/// Sequential convenience wrapper over a [`Counter`].
#[derive(Debug, Clone)]
pub struct SeqRng {
    ctr: Counter,
    i: u64,
}

impl SeqRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        SeqRng { ctr: Counter::new(seed, stream), i: 0 }
    }

    #[inline(always)]
    fn bump(&mut self) -> u64 {
        let i = self.i;
        self.i += 1;
        i
    }

    pub fn next_u64(&mut self) -> u64 {
        let i = self.bump();
        self.ctr.value(i)
    }

    pub fn next_f64(&mut self) -> f64 {
        let i = self.bump();
        self.ctr.uniform(i)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn normal(&mut self) -> f64 {
        let i = self.bump();
        self.ctr.normal(i.wrapping_mul(3).wrapping_add(0x5555))
    }

    pub fn below(&mut self, m: u64) -> u64 {
        let i = self.bump();
        self.ctr.below(i, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_index_independent() {
        let a = Counter::new(7, 3);
        let b = Counter::new(7, 3);
        assert_eq!(a.value(0), b.value(0));
        assert_eq!(a.value(u64::MAX), b.value(u64::MAX));
        assert_ne!(a.value(1), a.value(2));
        let c = Counter::new(7, 4);
        assert_ne!(a.value(1), c.value(1));
    }

    #[test]
    fn uniform_moments() {
        let ctr = Counter::new(42, 0);
        let n = 20000u64;
        let mean: f64 = (0..n).map(|i| ctr.uniform(i)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01);
        let var: f64 =
            (0..n).map(|i| (ctr.uniform(i) - 0.5).powi(2)).sum::<f64>() / n as f64;
        assert!((var - 1.0 / 12.0).abs() < 0.005);
    }

    #[test]
    fn normal_moments() {
        let ctr = Counter::new(5, 9);
        let n = 20000u64;
        let mean: f64 = (0..n).map(|i| ctr.normal(i)).sum::<f64>() / n as f64;
        let var: f64 = (0..n).map(|i| ctr.normal(i).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }
}
