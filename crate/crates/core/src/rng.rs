//! SplitMix64, the one generator every randomized routine draws from.
//!
//! Seeded outputs are part of the public contract (golden files, witness
//! sets), so the stream is fixed here rather than delegated to a crate whose
//! algorithm may change between releases.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Top 53 bits of the next draw, an integer in `[0, 2^53)`.
    pub fn next_u53(&mut self) -> u64 {
        self.next_u64() >> 11
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        self.next_u53() as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial with success probability `num/den`, decided exactly:
    /// success iff `u53 * den < num * 2^53`.
    pub fn bernoulli_ratio(&mut self, num: i128, den: i128) -> bool {
        let u = self.next_u53() as i128;
        match (u.checked_mul(den), num.checked_mul(1i128 << 53)) {
            (Some(a), Some(b)) => a < b,
            _ => num_rational::Ratio::new(u, 1i128 << 53) < num_rational::Ratio::new(num, den),
        }
    }

    /// Uniform integer in `[0, bound)` by rejection; `bound > 0`.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}

/// The SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent trial derived from a base seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
