//! Seedable, splittable random streams.
//!
//! A [`StreamKey`] names a position in a tree of streams. Children are
//! derived by mixing a tag into the parent key, so the stream used by
//! resample `i` of the null arm is a pure function of `(seed, arm, i)`.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic key for deriving independent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub const fn new(seed: u64) -> Self {
        StreamKey(seed)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    /// Key of the child stream labelled `tag`.
    pub fn child(self, tag: u64) -> Self {
        StreamKey(splitmix64(self.0 ^ splitmix64(tag.wrapping_mul(GOLDEN_GAMMA))))
    }

    pub fn rng(self) -> RandomState {
        RandomState::from_key(self)
    }
}

/// Explicit random state threaded through every sampling routine.
#[derive(Debug, Clone)]
pub struct RandomState(ChaCha8Rng);

impl RandomState {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self::from_key(StreamKey::new(seed))
    }

    fn from_key(key: StreamKey) -> Self {
        let mut seed = [0u8; 32];
        let mut z = key.raw();
        for chunk in seed.chunks_exact_mut(8) {
            z = splitmix64(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        RandomState(ChaCha8Rng::from_seed(seed))
    }

    /// Splits off an independent stream, advancing `self`.
    pub fn split(&mut self) -> RandomState {
        let tag = self.0.next_u64();
        StreamKey::new(tag).rng()
    }
}

impl RngCore for RandomState {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}
