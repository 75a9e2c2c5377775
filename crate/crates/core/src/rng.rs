//! Counter-based pseudo-random numbers for reproducible, partition-invariant
//! Monte Carlo.
//!
//! Every stream is keyed by `(seed, index)` and advances a local counter
//! through a SplitMix64-style finalizer, so sample `i` draws exactly the same
//! numbers no matter how work is split across threads. Not cryptographic.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic stream derived from `(seed, index)` alone.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    ctr: u64,
}

impl CounterRng {
    pub fn new(seed: u64, index: u64) -> Self {
        let key = mix(mix(seed.wrapping_add(GOLDEN)) ^ index.wrapping_mul(GOLDEN));
        CounterRng { key, ctr: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.ctr = self.ctr.wrapping_add(1);
        mix(self.key.wrapping_add(self.ctr.wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in [0, bound).
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        // Modulo bias is ≤ bound/2^64, irrelevant for the small bounds used here.
        self.next_u64() % bound
    }

    /// A pair of independent standard normals (Box–Muller).
    #[inline]
    pub fn standard_normal_pair(&mut self) -> (f64, f64) {
        // Shift by half an ulp so the log argument is never zero.
        let u1 = ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        (r * t.cos(), r * t.sin())
    }
}
