//! Seeded randomness.
//!
//! Every draw in a simulation comes from a ChaCha20 keystream (the original
//! 64-bit-nonce variant). The key is expanded from a 64-bit seed with
//! SplitMix64, and independent streams are addressed through the ChaCha
//! nonce, so a given `(seed, purpose, step, agent)` always yields the same
//! sequence regardless of evaluation order or thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// SplitMix64 output function. Used for key expansion and seed derivation.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine several words into one 64-bit seed.
pub fn mix_words(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &w| mix64(acc ^ mix64(w)))
}

/// What a substream is used for. Part of the stream address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Agents = 1,
    Graph = 2,
    Catalog = 3,
    Activity = 4,
    Act = 5,
    Recommend = 6,
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            chunk.copy_from_slice(&mix64(state).to_le_bytes());
        }
        RandomSource {
            rng: ChaCha20Rng::from_seed(key),
        }
    }

    /// Independent stream for `(seed, purpose, step, agent)`.
    ///
    /// The nonce packs purpose (8 bits), step (24 bits) and agent id (32 bits),
    /// so distinct addresses never share a keystream.
    pub fn substream(seed: u64, purpose: Purpose, step: u32, agent: u32) -> Self {
        debug_assert!(step < (1 << 24));
        let mut src = RandomSource::from_seed(seed);
        let stream =
            ((purpose as u64) << 56) | (((step as u64) & 0xFF_FFFF) << 32) | agent as u64;
        src.rng.set_stream(stream);
        src
    }

    /// Raw keystream with an explicit key, for test vectors.
    pub fn from_key(key: [u8; 32], stream: u64) -> Self {
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream);
        RandomSource { rng }
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Uniform draw on the unit sphere in `dim` dimensions (normalized i.i.d. normals).
pub fn sample_unit_vector<R: RngCore + ?Sized>(dim: usize, rng: &mut R) -> Result<Vec<f64>> {
    if dim == 0 {
        return Err(Error::invalid("unit vector dimension must be at least 1"));
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if let Some(u) = normalized(v) {
            return Ok(u);
        }
    }
}

/// Scale to unit L2 norm. `None` for the zero vector.
pub fn normalized(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = l2_norm(&v);
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
