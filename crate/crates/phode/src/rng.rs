//! Deterministic seed derivation.
//!
//! All randomness in the toolkit flows from `(master seed, purpose tag,
//! sentence id)` through a hash-based split, so any stage of the pipeline can
//! be re-run in isolation and reproduce the exact stream it saw in a full run.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use sha2::{Digest, Sha256};

/// Derive an independent RNG for one (purpose, key) pair under a master seed.
pub fn derive_rng(master_seed: u64, purpose: &str, key: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(purpose.as_bytes());
    hasher.update([0u8]);
    hasher.update(key.as_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}

/// Collapse a (purpose, key) split to a single u64, for APIs that accept a
/// plain seed instead of an RNG.
pub fn derive_seed(master_seed: u64, purpose: &str, key: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update([1u8]);
    hasher.update(purpose.as_bytes());
    hasher.update([0u8]);
    hasher.update(key.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 digest is 32 bytes"))
}
