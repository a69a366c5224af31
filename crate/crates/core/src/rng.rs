//! Seeded uniform streams.
//!
//! Generator: ChaCha8 with a 256-bit key holding the little-endian seed in its
//! first eight bytes (remaining bytes zero) and the ChaCha stream id set to
//! the stream index. A uniform draw is the top 53 bits of the next `u64`
//! output scaled by `2^-53`, so it lies in `[0, 1)`. The sequence depends on
//! nothing but `(seed, stream)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Stream index for own values `v_t`.
pub const VALUE_STREAM: u64 = 0;
/// Stream index for highest rival bids `m_t`.
pub const RIVAL_STREAM: u64 = 1;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn word_position(&self) -> u128 {
        self.inner.get_word_pos()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Sub-seed for replication `rep` of a sweep seeded with `master`.
pub fn replication_seed(master: u64, rep: u64) -> u64 {
    master ^ rep
}
