//! Seed derivation.
//!
//! A run has one master seed. Each `(sample_index, epoch)` pair gets its own
//! 64-bit sample seed, and each augmentation gets an independent sub-stream
//! of that sample seed. Derivation uses the SplitMix64 finalizer:
//!
//! ```text
//! mix(z)  = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB;
//!           z ^= z >> 31
//! step(s, x) = mix((s ^ x) + 0x9E3779B97F4A7C15)     (wrapping)
//!
//! sample_seed = step(step(step(0, master), sample_index), epoch)
//! stream_seed = step(sample_seed, stream_id)
//! ```
//!
//! A seed becomes a ChaCha8 stream via `rand_core`'s `seed_from_u64`
//! (PCG32 key expansion), so streams are reproducible on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type AugRng = ChaCha8Rng;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn step(state: u64, input: u64) -> u64 {
    mix64((state ^ input).wrapping_add(GAMMA))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedScheme {
    pub master_seed: u64,
}

impl SeedScheme {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn sample_seed(&self, sample_index: u64, epoch: u64) -> u64 {
        step(step(step(0, self.master_seed), sample_index), epoch)
    }

    pub fn derive_rng(&self, sample_index: u64, epoch: u64) -> AugRng {
        AugRng::seed_from_u64(self.sample_seed(sample_index, epoch))
    }
}

/// Seed of the sub-stream `stream_id` under `sample_seed`.
pub fn stream_seed(sample_seed: u64, stream_id: u64) -> u64 {
    step(sample_seed, stream_id)
}

pub fn substream(sample_seed: u64, stream_id: u64) -> AugRng {
    AugRng::seed_from_u64(stream_seed(sample_seed, stream_id))
}

pub fn rng_from_seed(seed: u64) -> AugRng {
    AugRng::seed_from_u64(seed)
}
