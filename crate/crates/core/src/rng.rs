//! Portable pseudo-random numbers.
//!
//! Every random decision in the crate (shuffles, weight init, synthetic data)
//! is drawn from [`SplitMix64`], so any implementation that follows the
//! recipes below reproduces splits and cohorts bit for bit:
//!
//! * state update: `state = state + 0x9E3779B97F4A7C15 (mod 2^64)`
//! * output: `z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//!   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`
//! * `next_f64`: `(next_u64 >> 11) * 2^-53`, uniform on `[0, 1)`
//! * `below(n)`: `next_u64 % n`
//! * `shuffle`: Fisher-Yates from the back, `for i in (1..len).rev() { swap(i, below(i + 1)) }`
//! * `gaussian`: Box-Muller cosine branch, `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`,
//!   consuming two uniforms per sample
//!
//! Stage seeds are derived with [`derive_seed`]: the 64-bit FNV-1a hash of the
//! stage name is XORed into the root seed and passed through one SplitMix64
//! output step.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn gaussian(&mut self, mean: f64, sd: f64) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        mean + sd * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed for a named stage, derived from the run's root seed.
pub fn derive_seed(root: u64, stage: &str) -> u64 {
    mix((root ^ fnv1a64(stage.as_bytes())).wrapping_add(GOLDEN))
}
