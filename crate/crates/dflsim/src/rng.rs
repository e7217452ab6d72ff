//! Seed derivation and content hashing.
//!
//! Every random decision in the crate draws from a ChaCha stream keyed by
//! (master seed, label, indices). Streams for different labels or indices are
//! decorrelated, and the whole derivation is platform-independent, which is
//! what makes run outputs byte-reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a child seed from a master seed, a stream label, and stream indices.
pub fn derive_seed(master: u64, label: &str, parts: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update([0u8]);
    h.update(label.as_bytes());
    for p in parts {
        h.update([0u8]);
        h.update(p.to_le_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// A fresh RNG for the derived stream.
pub fn stream(master: u64, label: &str, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label, parts))
}

/// Hex SHA-256 of arbitrary bytes; used for topology/dataset/config hashes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}
