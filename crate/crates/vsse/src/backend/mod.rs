//! Concrete searchable-encryption backends.
//!
//! Two schemes live here behind shared types: a static encrypted inverted
//! index ([`static_index`]) and a hash-chain dynamic index ([`chain`]) whose
//! update tokens are unlinkable to earlier searches. The verifiability
//! layers wrap these without reaching into their internals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::crypto::{doc_name, CryptoError, Scalar};

pub mod chain;
pub mod static_index;

pub use chain::{ChainSearchToken, ChainToken, KeywordState};
pub use static_index::StaticToken;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SseError {
    #[error("keyword must be non-empty")]
    EmptyKeyword,
    #[error("keyword exceeds 256 bytes ({0})")]
    KeywordTooLong(usize),
    #[error("duplicate document id within one keyword's postings")]
    DuplicatePosting,
    #[error("derived storage location already occupied")]
    LocationCollision,
    #[error("index is missing an entry the token points at")]
    IncompleteIndex,
    #[error("stored value has the wrong width ({0} bytes)")]
    MalformedCell(usize),
    #[error("chain walk did not terminate at the zero sentinel")]
    BrokenChain,
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

/// Fixed 16-byte opaque document identifier. As a big-endian integer it is
/// always below the group order, so the scalar embedding is injective.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DocId(pub [u8; 16]);

impl DocId {
    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let mut bytes = [0u8; 16];
        hex::decode_to_slice(s, &mut bytes)?;
        Ok(DocId(bytes))
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn to_scalar(&self) -> Scalar {
        Scalar::from_id_bytes(&self.0)
    }

    /// The public name the cloud stores the document under.
    pub fn name(&self) -> [u8; 32] {
        doc_name(&self.0)
    }
}

impl std::fmt::Debug for DocId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DocId({})", self.to_hex())
    }
}

impl Serialize for DocId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for DocId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        DocId::from_hex(&text).map_err(serde::de::Error::custom)
    }
}

/// A search keyword: UTF-8, 1..=256 bytes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Keyword(String);

impl Keyword {
    pub fn new(text: impl Into<String>) -> Result<Self, SseError> {
        let text = text.into();
        if text.is_empty() {
            return Err(SseError::EmptyKeyword);
        }
        if text.len() > 256 {
            return Err(SseError::KeywordTooLong(text.len()));
        }
        Ok(Keyword(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }
}

impl TryFrom<String> for Keyword {
    type Error = SseError;
    fn try_from(s: String) -> Result<Self, SseError> {
        Keyword::new(s)
    }
}

impl From<Keyword> for String {
    fn from(k: Keyword) -> String {
        k.0
    }
}

impl std::fmt::Debug for Keyword {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Keyword({:?})", self.0)
    }
}

impl std::fmt::Display for Keyword {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Plaintext inverted index: keyword to ordered postings. Postings keep
/// insertion order and never repeat an id under the same keyword.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct PlainDb {
    postings: BTreeMap<Keyword, Vec<DocId>>,
}

impl PlainDb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, w: Keyword, id: DocId) -> Result<(), SseError> {
        let list = self.postings.entry(w).or_default();
        if list.contains(&id) {
            return Err(SseError::DuplicatePosting);
        }
        list.push(id);
        Ok(())
    }

    pub fn postings(&self, w: &Keyword) -> &[DocId] {
        self.postings.get(w).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn keywords(&self) -> impl Iterator<Item = &Keyword> {
        self.postings.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Keyword, &[DocId])> {
        self.postings.iter().map(|(w, ids)| (w, ids.as_slice()))
    }

    /// Total keyword-document pair count.
    pub fn total_pairs(&self) -> usize {
        self.postings.values().map(Vec::len).sum()
    }

    pub fn keyword_count(&self) -> usize {
        self.postings.len()
    }

    /// Random database for tests and benchmarks: up to `max_keywords`
    /// keywords sharing a pool of ids, at most `max_pairs` pairs total.
    pub fn random<R: rand::Rng>(rng: &mut R, max_keywords: usize, max_pairs: usize) -> Self {
        let n_kw = rng.gen_range(1..=max_keywords.max(1));
        let pool: Vec<DocId> = (0..max_pairs.max(1))
            .map(|_| {
                let mut id = [0u8; 16];
                rng.fill(&mut id);
                DocId(id)
            })
            .collect();
        let mut db = PlainDb::new();
        let mut budget = max_pairs;
        for k in 0..n_kw {
            if budget == 0 {
                break;
            }
            let w = Keyword::new(format!("kw-{k:03}")).expect("short ASCII keyword");
            let take = rng.gen_range(0..=budget.min(pool.len()));
            let mut chosen = pool.clone();
            for i in (1..chosen.len()).rev() {
                chosen.swap(i, rng.gen_range(0..=i));
            }
            for id in chosen.into_iter().take(take) {
                db.insert(w.clone(), id).expect("pool ids are distinct");
                budget -= 1;
            }
        }
        db
    }
}

/// Encrypted index: 32-byte pseudorandom locations to opaque values.
/// Iteration is sorted by location, which is itself a PRF output, so order
/// reveals nothing about insertion history.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct EncryptedIndex {
    table: BTreeMap<Location, Vec<u8>>,
}

impl Serialize for EncryptedIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.table.len()))?;
        for (loc, value) in &self.table {
            map.serialize_entry(&hex::encode(loc.0), &hex::encode(value))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for EncryptedIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        let mut table = BTreeMap::new();
        for (loc_hex, value_hex) in raw {
            let mut loc = [0u8; 32];
            hex::decode_to_slice(&loc_hex, &mut loc).map_err(serde::de::Error::custom)?;
            let value = hex::decode(&value_hex).map_err(serde::de::Error::custom)?;
            table.insert(Location(loc), value);
        }
        Ok(EncryptedIndex { table })
    }
}

/// Hex-serialized 32-byte location key.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location(pub [u8; 32]);

impl Serialize for Location {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for Location {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let mut bytes = [0u8; 32];
        hex::decode_to_slice(&text, &mut bytes).map_err(serde::de::Error::custom)?;
        Ok(Location(bytes))
    }
}

impl std::fmt::Debug for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Location({})", hex::encode(self.0))
    }
}

impl EncryptedIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts at a fresh location; an occupied location is a hard error
    /// (a 2^-256 accident or a logic bug, never silently overwritten).
    pub fn insert_new(&mut self, loc: [u8; 32], value: Vec<u8>) -> Result<(), SseError> {
        match self.table.entry(Location(loc)) {
            std::collections::btree_map::Entry::Occupied(_) => Err(SseError::LocationCollision),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(value);
                Ok(())
            }
        }
    }

    pub fn get(&self, loc: &[u8; 32]) -> Option<&[u8]> {
        self.table.get(&Location(*loc)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8; 32], &[u8])> {
        self.table.iter().map(|(l, v)| (&l.0, v.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn keyword_bounds() {
        assert_eq!(Keyword::new(""), Err(SseError::EmptyKeyword));
        assert!(Keyword::new("a").is_ok());
        assert!(Keyword::new("x".repeat(256)).is_ok());
        assert_eq!(
            Keyword::new("x".repeat(257)),
            Err(SseError::KeywordTooLong(257))
        );
    }

    #[test]
    fn plain_db_rejects_duplicate_pair() {
        let mut db = PlainDb::new();
        let w = Keyword::new("w").unwrap();
        let id = DocId([7u8; 16]);
        db.insert(w.clone(), id).unwrap();
        assert_eq!(db.insert(w.clone(), id), Err(SseError::DuplicatePosting));
        assert_eq!(db.postings(&w), &[id]);
        assert_eq!(db.total_pairs(), 1);
    }

    #[test]
    fn random_db_respects_bounds() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..20 {
            let db = PlainDb::random(&mut rng, 10, 60);
            assert!(db.keyword_count() <= 10);
            assert!(db.total_pairs() <= 60);
            for (_, ids) in db.iter() {
                let set: std::collections::HashSet<_> = ids.iter().collect();
                assert_eq!(set.len(), ids.len());
            }
        }
    }

    #[test]
    fn index_rejects_location_collision() {
        let mut idx = EncryptedIndex::new();
        idx.insert_new([1u8; 32], vec![0]).unwrap();
        assert_eq!(
            idx.insert_new([1u8; 32], vec![1]),
            Err(SseError::LocationCollision)
        );
        assert_eq!(idx.len(), 1);
    }

    #[test]
    fn doc_id_hex_round_trip() {
        let id = DocId([0xAB; 16]);
        assert_eq!(DocId::from_hex(&id.to_hex()).unwrap(), id);
        assert!(DocId::from_hex("zz").is_err());
        assert!(DocId::from_hex("ab").is_err());
    }
}
