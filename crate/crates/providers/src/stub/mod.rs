//! Deterministic offline providers. Each output is a pure function of the
//! input bytes (and a seed where one applies), so whole pipeline runs are
//! reproducible byte for byte.

mod chat;
mod embed;
mod render;
mod vision;

pub use chat::{synthetic_reply, ReplayChat};
pub use embed::{HashEmbedder, TableEmbedder, HASH_EMBEDDING_DIM};
pub use render::{StubGenerator, StubStylizer};
pub use vision::{StubCaptioner, StubSegmenter};

use recomb_core::blob::sha256_hex;

/// 64-bit seed taken from the SHA-256 of the concatenated parts.
pub(crate) fn seed_of(parts: &[&[u8]]) -> u64 {
    let joined: Vec<u8> = parts.join(&0u8);
    u64::from_str_radix(&sha256_hex(&joined)[..16], 16).expect("hex digest")
}
