//! Pairing-group arithmetic and symmetric primitives.
//!
//! The group layer presents the multiplicative notation the schemes are
//! written in: `G1Elem` holds signatures and hashed messages, `G2Elem` holds
//! public keys, and `pairing` maps one of each into `GtElem`. Everything is
//! backed by BLS12-381; the prime order q of all three groups is ~2^255.
//!
//! The symmetric layer provides the keyed PRF `prf` (HMAC-SHA256), the
//! random-access PRG `prg_block`, the unkeyed tagged hashes, and the
//! document-name map. All domain separation goes through the fixed ASCII
//! prefixes in [`tags`].

mod bls;
mod group;
mod symm;

pub use bls::{bilinear_hash, sign, verify, BlsKeyPair};
pub use group::{hash_to_scalar, pairing, G1Elem, G2Elem, GtElem, Scalar};
pub use symm::{doc_name, prf, prf_key, prg_block, tagged_hash, tagged_hash16, SymKey};

use thiserror::Error;

/// Domain-separation tags. Each fixed ASCII prefix dedicates a hash or PRF
/// use to one purpose so values never collide across protocol roles.
pub mod tags {
    /// Prefix of the SHA-512 expansion behind [`super::hash_to_scalar`].
    pub const H2S: &[u8] = b"h2s";
    /// Prefix of the per-index PRF inputs inside [`super::prg_block`].
    pub const PRG: &[u8] = b"r";
    /// Chain-entry location: `H("loc" || st)`.
    pub const LOC: &[u8] = b"loc";
    /// Chain-link mask: `H("chain" || st)`.
    pub const CHAIN: &[u8] = b"chain";
    /// Identifier mask: first 16 bytes of `H("mask" || st)`.
    pub const MASK: &[u8] = b"mask";
    /// Document-name map: `H("docname" || id)`.
    pub const DOCNAME: &[u8] = b"docname";
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("not a canonical scalar encoding")]
    InvalidScalar,
    #[error("not a valid group element encoding")]
    InvalidPoint,
    #[error("symmetric keys are exactly 32 bytes, got {0}")]
    KeyLength(usize),
    #[error("PRG block index must be at least 1")]
    PrgIndexZero,
}
