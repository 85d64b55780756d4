//! Seed derivation for replicas and streams.
//!
//! A derived seed is the first eight bytes (little endian) of
//! `SHA-256(master_seed || len(experiment) || experiment || replica || len(stream) || stream)`
//! with all integers encoded as little-endian `u64`. Any replica of any
//! experiment can therefore be replayed in isolation from the master seed.

use sha2::{Digest, Sha256};

pub fn derive_seed(master_seed: u64, experiment: &str, replica: u64, stream: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    hasher.update((experiment.len() as u64).to_le_bytes());
    hasher.update(experiment.as_bytes());
    hasher.update(replica.to_le_bytes());
    hasher.update((stream.len() as u64).to_le_bytes());
    hasher.update(stream.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
