//! Counter-based 64-bit generator used by every Monte Carlo estimate.
//!
//! The `i`-th output (`i = 1, 2, ...`) of the stream with key `k` is
//!
//! ```text
//! mix64(k + i * 0x9E3779B97F4A7C15)            (wrapping arithmetic)
//! mix64(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!            z ^= z >> 27; z *= 0x94D049BB133111EB;
//!            z ^ (z >> 31)
//! ```
//!
//! i.e. SplitMix64 with its state written out as a counter. The key of
//! sub-stream `s` under master seed `m` is
//! `mix64(m ^ mix64((s + 1) * 0xD1B54A32D192ED03))`. Uniforms on `[0, 1)`
//! take the top 53 bits: `(x >> 11) * 2^-53`.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_GAMMA: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of sub-stream `stream` under `master_seed`.
pub fn stream_key(master_seed: u64, stream: u64) -> u64 {
    mix64(master_seed ^ mix64(stream.wrapping_add(1).wrapping_mul(STREAM_GAMMA)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        Self {
            key: stream_key(master_seed, stream),
            counter: 0,
        }
    }

    pub fn from_key(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    /// Output at position `index` (1-based) without advancing.
    #[inline]
    pub fn at(&self, index: u64) -> u64 {
        mix64(self.key.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        self.at(self.counter)
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential variate by inversion: `-mean ln(1 - r)`.
    #[inline]
    pub fn next_exp(&mut self, mean: f64) -> f64 {
        -mean * (-self.next_f64()).ln_1p()
    }
}
