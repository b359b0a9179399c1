//! Seed derivation.
//!
//! Child seeds are the first eight bytes (little endian) of
//! `SHA-256(master_le || purpose || 0x00 || index_le)`. The scheme is part
//! of the reproducibility contract and must not change between versions.

use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPurpose<'a> {
    /// Environment specification of an episode.
    Spec,
    /// Percept variates of an episode.
    Percepts,
    /// Policy randomness of the algorithm with this label.
    Policy(&'a str),
}

pub fn derive_seed(master: u64, purpose: SeedPurpose<'_>, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    match purpose {
        SeedPurpose::Spec => h.update(b"spec"),
        SeedPurpose::Percepts => h.update(b"percepts"),
        SeedPurpose::Policy(label) => {
            h.update(b"policy/");
            h.update(label.as_bytes());
        }
    }
    h.update([0u8]);
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}
