//! Static encrypted inverted index.
//!
//! Each keyword's postings become fixed 32-byte cells stored at pseudorandom
//! locations: cell i of keyword w lives at prf(k1_w, i) with value
//! plaintext XOR prf(k2_w, i), where k1_w and k2_w are derived from the
//! build key. A search token releases (k1_w, k2_w, count) for one keyword;
//! the holder recovers that keyword's cells and nothing else.
//!
//! The cell layer is deliberately generic: callers may store any 32-byte
//! plaintext per slot. Document ids travel as id plus zero padding, which
//! lets a verification layer slot a raw 32-byte tag into the same sequence
//! without the storage format giving it away.

use serde::{Deserialize, Serialize};

use crate::crypto::{prf, prf_key, SymKey};

use super::{DocId, EncryptedIndex, Keyword, PlainDb, SseError};

const KEY1_TAG: &[u8] = b"k1";
const KEY2_TAG: &[u8] = b"k2";

/// Per-keyword search capability. Reveals locations and pads for exactly
/// `count` cells of one keyword.
#[derive(Clone, Serialize, Deserialize)]
pub struct StaticToken {
    pub k1: SymKey,
    pub k2: SymKey,
    pub count: u64,
}

fn derive_keys(key: &SymKey, w: &Keyword) -> (SymKey, SymKey) {
    let mut msg = Vec::with_capacity(2 + w.as_bytes().len());
    msg.extend_from_slice(KEY1_TAG);
    msg.extend_from_slice(w.as_bytes());
    let k1 = prf_key(key, &msg);
    msg.clear();
    msg.extend_from_slice(KEY2_TAG);
    msg.extend_from_slice(w.as_bytes());
    let k2 = prf_key(key, &msg);
    (k1, k2)
}

fn cell_location(k1: &SymKey, i: u64) -> [u8; 32] {
    prf(k1, &i.to_be_bytes())
}

fn cell_pad(k2: &SymKey, i: u64) -> [u8; 32] {
    prf(k2, &i.to_be_bytes())
}

/// Encodes an id as a cell: id then zero padding.
pub fn id_cell(id: &DocId) -> [u8; 32] {
    let mut cell = [0u8; 32];
    cell[..16].copy_from_slice(&id.0);
    cell
}

/// Inverse of [`id_cell`]. Nonzero padding means the cell never held an id.
pub fn cell_id(cell: &[u8; 32]) -> Result<DocId, SseError> {
    if cell[16..] != [0u8; 16] {
        return Err(SseError::MalformedCell(32));
    }
    Ok(DocId(cell[..16].try_into().expect("split at 16")))
}

/// Encrypts per-keyword cell sequences into one index. Cells are 1-indexed
/// within each keyword.
pub fn build_cells<'a, I>(key: &SymKey, entries: I) -> Result<EncryptedIndex, SseError>
where
    I: IntoIterator<Item = (&'a Keyword, Vec<[u8; 32]>)>,
{
    let mut index = EncryptedIndex::new();
    for (w, cells) in entries {
        let (k1, k2) = derive_keys(key, w);
        for (slot, cell) in cells.iter().enumerate() {
            let i = slot as u64 + 1;
            let pad = cell_pad(&k2, i);
            let mut value = [0u8; 32];
            for b in 0..32 {
                value[b] = cell[b] ^ pad[b];
            }
            index.insert_new(cell_location(&k1, i), value.to_vec())?;
        }
    }
    Ok(index)
}

/// Encrypts a plaintext database, one id cell per posting.
pub fn build(key: &SymKey, db: &PlainDb) -> Result<EncryptedIndex, SseError> {
    build_cells(key, db.iter().map(|(w, ids)| (w, ids.iter().map(id_cell).collect())))
}

/// Token for `count` cells of keyword w. The count is the caller's:
/// this layer keeps no per-keyword state.
pub fn search_token(key: &SymKey, w: &Keyword, count: u64) -> StaticToken {
    let (k1, k2) = derive_keys(key, w);
    StaticToken { k1, k2, count }
}

/// Recovers the token's cells in slot order. Every location the token
/// names must be present.
pub fn search_cells(index: &EncryptedIndex, token: &StaticToken) -> Result<Vec<[u8; 32]>, SseError> {
    let mut cells = Vec::with_capacity(token.count as usize);
    for i in 1..=token.count {
        let value = index
            .get(&cell_location(&token.k1, i))
            .ok_or(SseError::IncompleteIndex)?;
        if value.len() != 32 {
            return Err(SseError::MalformedCell(value.len()));
        }
        let pad = cell_pad(&token.k2, i);
        let mut cell = [0u8; 32];
        for b in 0..32 {
            cell[b] = value[b] ^ pad[b];
        }
        cells.push(cell);
    }
    Ok(cells)
}

/// Recovers the postings of a keyword whose cells are all id cells.
pub fn search(index: &EncryptedIndex, token: &StaticToken) -> Result<Vec<DocId>, SseError> {
    search_cells(index, token)?.iter().map(cell_id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::BTreeMap;

    fn key(byte: u8) -> SymKey {
        SymKey([byte; 32])
    }

    fn kw(s: &str) -> Keyword {
        Keyword::new(s).unwrap()
    }

    #[test]
    fn empty_db_builds_empty_index() {
        let index = build(&key(1), &PlainDb::new()).unwrap();
        assert!(index.is_empty());
    }

    #[test]
    fn singleton_round_trip() {
        let mut db = PlainDb::new();
        let id = DocId([9u8; 16]);
        db.insert(kw("alpha"), id).unwrap();
        let index = build(&key(1), &db).unwrap();
        assert_eq!(index.len(), 1);
        let token = search_token(&key(1), &kw("alpha"), 1);
        assert_eq!(search(&index, &token).unwrap(), vec![id]);
    }

    #[test]
    fn unknown_keyword_yields_empty_result() {
        let index = build(&key(1), &PlainDb::new()).unwrap();
        let token = search_token(&key(1), &kw("ghost"), 0);
        assert_eq!(search(&index, &token).unwrap(), vec![]);
    }

    #[test]
    fn oracle_equivalence_over_random_databases() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for _ in 0..100 {
            let db = PlainDb::random(&mut rng, 20, 500);
            let k = key(7);
            let index = build(&k, &db).unwrap();
            assert_eq!(index.len(), db.total_pairs());
            for (w, ids) in db.iter() {
                let token = search_token(&k, w, ids.len() as u64);
                assert_eq!(search(&index, &token).unwrap(), ids);
            }
        }
    }

    #[test]
    fn tokens_of_distinct_keywords_share_no_keys() {
        let token_a = search_token(&key(1), &kw("aa"), 3);
        let token_b = search_token(&key(1), &kw("ab"), 3);
        assert_ne!(token_a.k1.0, token_b.k1.0);
        assert_ne!(token_a.k2.0, token_b.k2.0);
        assert_ne!(token_a.k1.0, token_a.k2.0);
    }

    #[test]
    fn determinism_per_key_and_keyword() {
        let t1 = search_token(&key(1), &kw("w"), 2);
        let t2 = search_token(&key(1), &kw("w"), 2);
        assert_eq!(t1.k1.0, t2.k1.0);
        assert_eq!(t1.k2.0, t2.k2.0);
    }

    #[test]
    fn missing_location_is_reported() {
        let mut db = PlainDb::new();
        db.insert(kw("w"), DocId([1u8; 16])).unwrap();
        let index = build(&key(1), &db).unwrap();
        // Token claims two cells; only one was built.
        let token = search_token(&key(1), &kw("w"), 2);
        assert_eq!(search(&index, &token), Err(SseError::IncompleteIndex));
    }

    #[test]
    fn arbitrary_cells_round_trip() {
        let mut cells = BTreeMap::new();
        let raw = [0xEE; 32];
        cells.insert(kw("w"), vec![id_cell(&DocId([3u8; 16])), raw]);
        let index = build_cells(&key(2), cells.iter().map(|(w, c)| (w, c.clone()))).unwrap();
        let token = search_token(&key(2), &kw("w"), 2);
        let got = search_cells(&index, &token).unwrap();
        assert_eq!(got[0], id_cell(&DocId([3u8; 16])));
        assert_eq!(got[1], raw);
        // The raw cell has nonzero padding, so it never decodes as an id.
        assert!(cell_id(&raw).is_err());
    }

    #[test]
    fn postings_come_back_in_insertion_order() {
        let mut db = PlainDb::new();
        let ids: Vec<DocId> = (0..5u8).map(|b| DocId([b; 16])).collect();
        for id in &ids {
            db.insert(kw("w"), *id).unwrap();
        }
        let index = build(&key(3), &db).unwrap();
        let token = search_token(&key(3), &kw("w"), 5);
        assert_eq!(search(&index, &token).unwrap(), ids);
    }
}
