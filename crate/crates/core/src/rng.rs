//! Counter-based deterministic random streams.
//!
//! A stream is keyed by `(seed, index, label)`. The key is hashed with
//! SHA-256 into a ChaCha8 seed, so streams can be created in any order and on
//! any thread without sharing state.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    index: u64,
    label: String,
    inner: ChaCha8Rng,
}

pub fn derive_rng(seed: u64, index: u64, label: &str) -> RngStream {
    let mut hasher = Sha256::new();
    hasher.update(b"lsq-rng-v1\0");
    hasher.update(seed.to_le_bytes());
    hasher.update(index.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    let key: [u8; 32] = hasher.finalize().into();
    RngStream {
        seed,
        index,
        label: label.to_owned(),
        inner: ChaCha8Rng::from_seed(key),
    }
}

impl RngStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Independent stream for a sub-purpose; does not consume draws from `self`.
    pub fn child(&self, sub: &str) -> RngStream {
        derive_rng(self.seed, self.index, &format!("{}/{}", self.label, sub))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
