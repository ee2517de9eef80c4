//! Hash-chain dynamic index with unlinkable updates.
//!
//! Each keyword grows a chain of entries. An update samples a fresh random
//! state st and stores, at location H("loc" || st), the id masked with
//! H("mask" || st) and the previous state masked with H("chain" || st).
//! Nothing in the entry is a function of the keyword or of any earlier
//! state, so the holder of old search tokens cannot link a new entry to
//! them: that is the forward-privacy mechanism. A search releases only the
//! newest state and the count; the index holder walks the chain backwards,
//! unmasking ids and recovering each entry's 1-based insertion position.

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::crypto::{tagged_hash, tagged_hash16, tags};

use super::{DocId, EncryptedIndex, SseError};

/// Owner-side per-keyword state: how many entries exist and where the chain
/// currently ends. The head is all-zero exactly when the counter is zero.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KeywordState {
    pub counter: u64,
    #[serde(with = "hex_head")]
    pub chain_head: [u8; 32],
}

mod hex_head {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(head: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(head))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let mut head = [0u8; 32];
        hex::decode_to_slice(&text, &mut head).map_err(serde::de::Error::custom)?;
        Ok(head)
    }
}

impl Default for KeywordState {
    fn default() -> Self {
        KeywordState { counter: 0, chain_head: [0u8; 32] }
    }
}

impl KeywordState {
    pub fn fresh() -> Self {
        Self::default()
    }
}

/// One encrypted chain entry plus the location to store it at. Carries no
/// value recomputable without the fresh state sampled at token time.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ChainToken {
    #[serde(with = "hex_head")]
    pub location: [u8; 32],
    #[serde(with = "hex16")]
    pub masked_id: [u8; 16],
    #[serde(with = "hex_head")]
    pub prev_link: [u8; 32],
}

mod hex16 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8; 16], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 16], D::Error> {
        let text = String::deserialize(d)?;
        let mut v = [0u8; 16];
        hex::decode_to_slice(&text, &mut v).map_err(serde::de::Error::custom)?;
        Ok(v)
    }
}

/// Search capability: the newest chain state and how many steps to walk.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ChainSearchToken {
    #[serde(with = "hex_head")]
    pub head: [u8; 32],
    pub count: u64,
}

/// Produces the entry for one new (keyword, id) pair and the advanced state.
/// The keyword itself never enters the computation; linkage to it exists
/// only through the owner's state map.
pub fn update_token<R: RngCore + CryptoRng>(
    state: &KeywordState,
    id: &DocId,
    rng: &mut R,
) -> (ChainToken, KeywordState) {
    let mut st_new = [0u8; 32];
    rng.fill_bytes(&mut st_new);

    let mask = tagged_hash16(tags::MASK, &st_new);
    let mut masked_id = [0u8; 16];
    for b in 0..16 {
        masked_id[b] = id.0[b] ^ mask[b];
    }

    let link = tagged_hash(tags::CHAIN, &st_new);
    let mut prev_link = [0u8; 32];
    for b in 0..32 {
        prev_link[b] = state.chain_head[b] ^ link[b];
    }

    let token = ChainToken {
        location: tagged_hash(tags::LOC, &st_new),
        masked_id,
        prev_link,
    };
    let next = KeywordState { counter: state.counter + 1, chain_head: st_new };
    (token, next)
}

/// Entry width on the wire and in the index: masked id then previous link.
const ENTRY_LEN: usize = 16 + 32;

pub fn apply(index: &mut EncryptedIndex, token: &ChainToken) -> Result<(), SseError> {
    let mut value = Vec::with_capacity(ENTRY_LEN);
    value.extend_from_slice(&token.masked_id);
    value.extend_from_slice(&token.prev_link);
    index.insert_new(token.location, value)
}

pub fn search_token(state: &KeywordState) -> ChainSearchToken {
    ChainSearchToken { head: state.chain_head, count: state.counter }
}

/// Walks the chain from the head, returning (id, insertion position) pairs
/// in insertion order, positions 1-based. The walk must cover exactly
/// `count` entries and end at the zero sentinel.
pub fn search(
    index: &EncryptedIndex,
    token: &ChainSearchToken,
) -> Result<Vec<(DocId, u64)>, SseError> {
    let mut out = Vec::with_capacity(token.count as usize);
    let mut st = token.head;
    for depth in 0..token.count {
        let loc = tagged_hash(tags::LOC, &st);
        let value = index.get(&loc).ok_or(SseError::IncompleteIndex)?;
        if value.len() != ENTRY_LEN {
            return Err(SseError::MalformedCell(value.len()));
        }

        let mask = tagged_hash16(tags::MASK, &st);
        let mut id = [0u8; 16];
        for b in 0..16 {
            id[b] = value[b] ^ mask[b];
        }

        let link = tagged_hash(tags::CHAIN, &st);
        let mut prev = [0u8; 32];
        for b in 0..32 {
            prev[b] = value[16 + b] ^ link[b];
        }

        out.push((DocId(id), token.count - depth));
        st = prev;
    }
    if st != [0u8; 32] {
        return Err(SseError::BrokenChain);
    }
    out.reverse();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{Keyword, PlainDb};
    use crate::crypto::{prf, SymKey};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::{BTreeMap, HashSet};

    #[test]
    fn empty_state_searches_empty() {
        let index = EncryptedIndex::new();
        let token = search_token(&KeywordState::fresh());
        assert_eq!(search(&index, &token).unwrap(), vec![]);
    }

    #[test]
    fn two_adds_come_back_in_insertion_order() {
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let mut index = EncryptedIndex::new();
        let id_a = DocId([0xAA; 16]);
        let id_b = DocId([0xBB; 16]);

        let (tok, state) = update_token(&KeywordState::fresh(), &id_a, &mut rng);
        apply(&mut index, &tok).unwrap();
        let (tok, state) = update_token(&state, &id_b, &mut rng);
        apply(&mut index, &tok).unwrap();

        let got = search(&index, &search_token(&state)).unwrap();
        assert_eq!(got, vec![(id_a, 1), (id_b, 2)]);
    }

    #[test]
    fn oracle_equivalence_with_indices() {
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        for _ in 0..100 {
            let db = PlainDb::random(&mut rng, 10, 500);
            let mut index = EncryptedIndex::new();
            let mut states: BTreeMap<Keyword, KeywordState> = BTreeMap::new();
            for (w, ids) in db.iter() {
                let mut state = KeywordState::fresh();
                for id in ids {
                    let (tok, next) = update_token(&state, id, &mut rng);
                    apply(&mut index, &tok).unwrap();
                    state = next;
                }
                states.insert(w.clone(), state);
            }
            assert_eq!(index.len(), db.total_pairs());
            for (w, ids) in db.iter() {
                let got = search(&index, &search_token(&states[w])).unwrap();
                let want: Vec<(DocId, u64)> = ids
                    .iter()
                    .enumerate()
                    .map(|(slot, id)| (*id, slot as u64 + 1))
                    .collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn same_pair_added_twice_lands_at_distinct_locations() {
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let id = DocId([1u8; 16]);
        let (tok_a, state) = update_token(&KeywordState::fresh(), &id, &mut rng);
        let (tok_b, _) = update_token(&state, &id, &mut rng);
        assert_ne!(tok_a.location, tok_b.location);
    }

    #[test]
    fn missing_entry_mid_chain_is_reported() {
        let mut rng = ChaCha20Rng::seed_from_u64(34);
        let mut index = EncryptedIndex::new();
        let (tok, state) = update_token(&KeywordState::fresh(), &DocId([1u8; 16]), &mut rng);
        apply(&mut index, &tok).unwrap();
        // Second entry never uploaded.
        let (_, state) = update_token(&state, &DocId([2u8; 16]), &mut rng);
        assert_eq!(
            search(&index, &search_token(&state)),
            Err(SseError::IncompleteIndex)
        );
    }

    #[test]
    fn understated_count_breaks_the_sentinel_check() {
        let mut rng = ChaCha20Rng::seed_from_u64(35);
        let mut index = EncryptedIndex::new();
        let mut state = KeywordState::fresh();
        for b in 1..=3u8 {
            let (tok, next) = update_token(&state, &DocId([b; 16]), &mut rng);
            apply(&mut index, &tok).unwrap();
            state = next;
        }
        let short = ChainSearchToken { head: state.chain_head, count: 2 };
        assert_eq!(search(&index, &short), Err(SseError::BrokenChain));
    }

    #[test]
    fn search_token_changes_on_every_add() {
        let mut rng = ChaCha20Rng::seed_from_u64(36);
        let state0 = KeywordState::fresh();
        let (_, state1) = update_token(&state0, &DocId([1u8; 16]), &mut rng);
        assert_ne!(search_token(&state0), search_token(&state1));
        assert_eq!(search_token(&state1).count, 1);
    }

    // Forward-privacy structure: collect every 32-byte value an index holder
    // could have seen for a keyword (search heads, walked states, locations,
    // stored entry halves), expand the set with the scheme's own hashes and
    // a PRF under each seen value, and check the next update token against
    // all of it.
    #[test]
    fn new_token_is_unlinkable_to_past_search_transcripts() {
        let mut rng = ChaCha20Rng::seed_from_u64(37);
        let mut index = EncryptedIndex::new();
        let mut state = KeywordState::fresh();
        let known_ids: Vec<DocId> = (1..=4u8).map(|b| DocId([b; 16])).collect();
        for id in &known_ids {
            let (tok, next) = update_token(&state, id, &mut rng);
            apply(&mut index, &tok).unwrap();
            state = next;
        }

        // Transcript of a search: token head plus every value the walk touches.
        let mut seen: Vec<[u8; 32]> = vec![search_token(&state).head];
        {
            let mut st = state.chain_head;
            for _ in 0..state.counter {
                let loc = tagged_hash(tags::LOC, &st);
                seen.push(loc);
                let value = index.get(&loc).unwrap();
                let link = tagged_hash(tags::CHAIN, &st);
                let mut prev = [0u8; 32];
                for b in 0..32 {
                    prev[b] = value[16 + b] ^ link[b];
                }
                seen.push(prev);
                st = prev;
            }
        }

        // Candidate values derivable from the transcript.
        let mut candidates: HashSet<[u8; 32]> = HashSet::new();
        for v in &seen {
            candidates.insert(*v);
            candidates.insert(tagged_hash(tags::LOC, v));
            candidates.insert(tagged_hash(tags::CHAIN, v));
            candidates.insert(tagged_hash(tags::MASK, v));
            candidates.insert(prf(&SymKey(*v), b""));
            for id in &known_ids {
                candidates.insert(prf(&SymKey(*v), &id.0));
            }
        }

        let (tok, _) = update_token(&state, &DocId([9u8; 16]), &mut rng);
        assert!(!candidates.contains(&tok.location));
        assert!(!candidates.contains(&tok.prev_link));
        let mut padded = [0u8; 32];
        padded[..16].copy_from_slice(&tok.masked_id);
        assert!(!candidates.contains(&padded));
    }
}
