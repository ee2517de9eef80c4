//! Privately verifiable static search: keyword-bound result tags.
//!
//! At build time every keyword's posting list gains one extra cell holding
//! a MAC over the ordered ids, keyed per keyword. The tag cell is
//! indistinguishable from an id cell in storage. At search time the owner
//! recomputes the MAC over the returned ids and compares: replaying another
//! keyword's complete, correctly tagged result fails, because the tag key
//! is bound to the keyword that was asked.
//!
//! Verification needs the owner's secret key, so only the querier can
//! check these results. The dynamic scheme in [`crate::signed`] is the
//! publicly auditable counterpart.

use std::collections::BTreeMap;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use subtle::ConstantTimeEq;

use crate::backend::static_index::{self, cell_id, id_cell, StaticToken};
use crate::backend::{DocId, EncryptedIndex, Keyword, PlainDb, SseError};
use crate::crypto::{prf, prf_key, SymKey};

/// Owner keys: one for the encrypted index, one independent master for
/// per-keyword tag keys.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticVKeys {
    pub base_key: SymKey,
    pub tag_master: SymKey,
}

impl StaticVKeys {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut base_key = [0u8; 32];
        let mut tag_master = [0u8; 32];
        rng.fill_bytes(&mut base_key);
        rng.fill_bytes(&mut tag_master);
        StaticVKeys { base_key: SymKey(base_key), tag_master: SymKey(tag_master) }
    }

    fn tag_key(&self, w: &Keyword) -> SymKey {
        prf_key(&self.tag_master, w.as_bytes())
    }
}

/// Owner-side record of how many postings each keyword was built with.
/// Needed to size search tokens and to catch shortened results.
#[derive(Clone, Default, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordCounts(pub BTreeMap<Keyword, u64>);

impl KeywordCounts {
    pub fn get(&self, w: &Keyword) -> u64 {
        self.0.get(w).copied().unwrap_or(0)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone, Copy, Serialize, Deserialize)]
pub enum VerifyError {
    #[error("result holds {got} cells, expected {expected}")]
    CountMismatch { expected: u64, got: u64 },
    #[error("a returned posting cell is not an id cell")]
    MalformedPosting,
    #[error("recomputed tag differs from the returned tag")]
    TagMismatch,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Backend(#[from] SseError),
    #[error("result rejected: {0}")]
    Rejected(#[from] VerifyError),
}

/// MAC over the ordered postings. Ids are fixed-width, so plain
/// concatenation is injective and needs no separators.
fn posting_tag(tag_key: &SymKey, ids: &[DocId]) -> [u8; 32] {
    let mut msg = Vec::with_capacity(ids.len() * 16);
    for id in ids {
        msg.extend_from_slice(&id.0);
    }
    prf(tag_key, &msg)
}

/// Encrypts the database with each keyword's tag appended as a final
/// pseudo-posting. Returns the index and the per-keyword counts the owner
/// must retain. Storage grows by exactly one cell per indexed keyword.
pub fn build(
    keys: &StaticVKeys,
    db: &PlainDb,
) -> Result<(EncryptedIndex, KeywordCounts), SseError> {
    let mut counts = KeywordCounts::default();
    let entries: Vec<(&Keyword, Vec<[u8; 32]>)> = db
        .iter()
        .map(|(w, ids)| {
            counts.0.insert(w.clone(), ids.len() as u64);
            let mut cells: Vec<[u8; 32]> = ids.iter().map(id_cell).collect();
            cells.push(posting_tag(&keys.tag_key(w), ids));
            (w, cells)
        })
        .collect();
    let index = static_index::build_cells(&keys.base_key, entries)?;
    Ok((index, counts))
}

/// Token sized to the postings plus the tag cell. A keyword that was never
/// built gets a zero-cell token: empty result, nothing to verify.
pub fn search_token(keys: &StaticVKeys, w: &Keyword, counts: &KeywordCounts) -> StaticToken {
    let c = counts.get(w);
    let cells = if c == 0 { 0 } else { c + 1 };
    static_index::search_token(&keys.base_key, w, cells)
}

/// Cloud side: recover the token's cells. The cloud cannot tell the tag
/// cell from the id cells.
pub fn cloud_answer(
    index: &EncryptedIndex,
    token: &StaticToken,
) -> Result<Vec<[u8; 32]>, SseError> {
    static_index::search_cells(index, token)
}

/// Owner side: split the trailing tag, recompute it over the ids, accept
/// on match. `expected` is the owner's retained posting count.
pub fn verify(
    keys: &StaticVKeys,
    w: &Keyword,
    expected: u64,
    cells: &[[u8; 32]],
) -> Result<Vec<DocId>, VerifyError> {
    if expected == 0 {
        return if cells.is_empty() {
            Ok(Vec::new())
        } else {
            Err(VerifyError::CountMismatch { expected: 0, got: cells.len() as u64 })
        };
    }
    if cells.len() as u64 != expected + 1 {
        return Err(VerifyError::CountMismatch {
            expected: expected + 1,
            got: cells.len() as u64,
        });
    }
    let (id_cells, tag_cell) = cells.split_at(cells.len() - 1);
    let ids: Vec<DocId> = id_cells
        .iter()
        .map(cell_id)
        .collect::<Result<_, _>>()
        .map_err(|_| VerifyError::MalformedPosting)?;
    let expected_tag = posting_tag(&keys.tag_key(w), &ids);
    if expected_tag.ct_eq(&tag_cell[0]).into() {
        Ok(ids)
    } else {
        Err(VerifyError::TagMismatch)
    }
}

/// End-to-end search against a local index: token, cloud answer, verify.
pub fn search(
    keys: &StaticVKeys,
    w: &Keyword,
    index: &EncryptedIndex,
    counts: &KeywordCounts,
) -> Result<Vec<DocId>, SearchError> {
    let token = search_token(keys, w, counts);
    let cells = cloud_answer(index, &token)?;
    Ok(verify(keys, w, counts.get(w), &cells)?)
}
