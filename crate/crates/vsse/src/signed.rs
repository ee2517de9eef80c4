//! Forward-private dynamic search with publicly auditable proofs.
//!
//! Alongside the encrypted index the cloud keeps a signature table: for
//! every keyword-document pair, one BLS signature over a blinded encoding
//! of the id, filed under a PRF-derived position. Answering a search, the
//! cloud multiplies the signatures of the returned pairs into a single
//! group element (its proof half). The owner re-derives the blinding
//! factors and folds the returned ids into a single scalar (its half). An
//! auditor holding only the public key checks one pairing equation:
//!
//!   e(cloud_half, g2) = e(g1^owner_half, pk)
//!
//! Both halves are constant size, the auditor does two pairings whatever
//! the result length, and the auditor learns nothing about the ids.
//!
//! Updates insert fresh chain entries and signature-table rows derived
//! from values no past search revealed, so the cloud cannot link an update
//! to earlier queries. Deletions run a second structure of the same shape
//! under domain-separated keys; a verified search then subtracts the
//! deleted set, accepting only if both structures' audits accept.

use std::collections::BTreeMap;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::backend::chain::{self, ChainSearchToken, ChainToken, KeywordState};
use crate::backend::{DocId, EncryptedIndex, Keyword, Location, PlainDb, SseError};
use crate::crypto::{pairing, prf, prf_key, BlsKeyPair, CryptoError, G1Elem, G2Elem, Scalar, SymKey};
use crate::crypto::{prg_block, sign};

/// Owner key set. The public key is published to the auditor; everything
/// else stays with the owner.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForwardVKeys {
    bls: BlsKeyPair,
    seed_master: SymKey,
    tag_master: SymKey,
}

/// Which of the twin structures an operation touches. Additions and
/// deletions are the same mechanism under domain-separated keys.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum StructureKind {
    Add,
    Del,
}

impl StructureKind {
    /// Equal-length prefixes keep the two structures' derivations disjoint
    /// even for keywords that begin with "add" or "del".
    fn prefix(self) -> &'static [u8; 3] {
        match self {
            StructureKind::Add => b"add",
            StructureKind::Del => b"del",
        }
    }
}

impl ForwardVKeys {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let bls = BlsKeyPair::generate(rng);
        let mut seed_master = [0u8; 32];
        let mut tag_master = [0u8; 32];
        rng.fill_bytes(&mut seed_master);
        rng.fill_bytes(&mut tag_master);
        ForwardVKeys {
            bls,
            seed_master: SymKey(seed_master),
            tag_master: SymKey(tag_master),
        }
    }

    pub fn from_parts(bls: BlsKeyPair, seed_master: SymKey, tag_master: SymKey) -> Self {
        ForwardVKeys { bls, seed_master, tag_master }
    }

    pub fn public_key(&self) -> G2Elem {
        self.bls.pk()
    }

    pub fn signing_key(&self) -> Scalar {
        self.bls.sk()
    }

    pub fn seed_master(&self) -> &SymKey {
        &self.seed_master
    }

    pub fn tag_master(&self) -> &SymKey {
        &self.tag_master
    }

    /// Per-keyword position key, sent to the cloud at search time.
    pub fn keyword_tag(&self, kind: StructureKind, w: &Keyword) -> SymKey {
        let mut msg = Vec::with_capacity(3 + w.as_bytes().len());
        msg.extend_from_slice(kind.prefix());
        msg.extend_from_slice(w.as_bytes());
        prf_key(&self.tag_master, &msg)
    }

    /// Per-keyword blinding seed. Never leaves the owner.
    fn keyword_seed(&self, kind: StructureKind, w: &Keyword) -> SymKey {
        let mut msg = Vec::with_capacity(3 + w.as_bytes().len());
        msg.extend_from_slice(kind.prefix());
        msg.extend_from_slice(w.as_bytes());
        prf_key(&self.seed_master, &msg)
    }
}

/// Signature-table row key for pair (id, i) of the keyword behind `tag`.
pub fn position(tag: &SymKey, id: &DocId, i: u64) -> [u8; 32] {
    let mut msg = [0u8; 24];
    msg[..16].copy_from_slice(&id.0);
    msg[16..].copy_from_slice(&i.to_be_bytes());
    prf(tag, &msg)
}

/// The blinded scalar a pair's signature commits to: prg(seed, i) * id.
pub fn pair_message(seed: &SymKey, id: &DocId, i: u64) -> Result<Scalar, CryptoError> {
    Ok(prg_block(seed, i)? * id.to_scalar())
}

/// Cloud-held map from positions to per-pair signatures. Grows by one row
/// per pair ever inserted; rows are never overwritten.
#[derive(Clone, Default, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureTable {
    entries: BTreeMap<Location, G1Elem>,
}

impl SignatureTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_new(&mut self, pos: [u8; 32], sigma: G1Elem) -> Result<(), SseError> {
        match self.entries.entry(Location(pos)) {
            std::collections::btree_map::Entry::Occupied(_) => Err(SseError::LocationCollision),
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(sigma);
                Ok(())
            }
        }
    }

    pub fn get(&self, pos: &[u8; 32]) -> Option<&G1Elem> {
        self.entries.get(&Location(*pos))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8; 32], &G1Elem)> {
        self.entries.iter().map(|(p, s)| (&p.0, s))
    }

    pub fn contains(&self, pos: &[u8; 32]) -> bool {
        self.entries.contains_key(&Location(*pos))
    }
}

/// One cloud-side structure: the encrypted index and its signature table.
#[derive(Clone, Default, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloudStructure {
    pub index: EncryptedIndex,
    pub tsig: SignatureTable,
}

/// Owner-side chain states for one structure.
#[derive(Clone, Default, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnerStates(pub BTreeMap<Keyword, KeywordState>);

impl OwnerStates {
    pub fn get(&self, w: &Keyword) -> KeywordState {
        self.0.get(w).copied().unwrap_or_default()
    }

    pub fn count(&self, w: &Keyword) -> u64 {
        self.get(w).counter
    }
}

/// The two proof halves of one search, as the auditor sees them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchProof {
    pub cloud_half: G1Elem,
    pub owner_half: Scalar,
}

impl SearchProof {
    /// Wire form: compressed group element then big-endian scalar.
    /// 80 bytes for every result size.
    pub fn to_bytes(&self) -> [u8; 80] {
        let mut out = [0u8; 80];
        out[..48].copy_from_slice(&self.cloud_half.to_bytes());
        out[48..].copy_from_slice(&self.owner_half.to_bytes());
        out
    }
}

/// Work the cloud did answering one search, beyond the backend walk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloudCost {
    pub lookups: u64,
    pub group_muls: u64,
}

/// Work the owner did verifying one result.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnerCost {
    pub mul_adds: u64,
}

/// Work the auditor did on one verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditCost {
    pub pairings: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq, Clone, Copy, Serialize, Deserialize)]
pub enum ProofError {
    #[error("result carries {got} pairs, owner expected {expected}")]
    CountMismatch { expected: u64, got: u64 },
    #[error("result indices are not the positions 1..=count in order")]
    IndexMismatch,
}

/// Builds the add-structure from a plaintext database by running the update
/// path once per pair, so a built store and an incrementally grown one have
/// the same shape.
pub fn build<R: RngCore + CryptoRng>(
    keys: &ForwardVKeys,
    db: &PlainDb,
    rng: &mut R,
) -> Result<(CloudStructure, OwnerStates), SseError> {
    let mut structure = CloudStructure::default();
    let mut states = OwnerStates::default();
    for (w, ids) in db.iter() {
        for id in ids {
            let token = update_token(keys, StructureKind::Add, id, &[w.clone()], &mut states, rng)?;
            apply_update(&mut structure, &token)?;
        }
    }
    Ok((structure, states))
}

/// What the owner sends the cloud to search one keyword in one structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRequest {
    pub token: ChainSearchToken,
    pub tag: SymKey,
}

pub fn search_request(
    keys: &ForwardVKeys,
    kind: StructureKind,
    w: &Keyword,
    states: &OwnerStates,
) -> SearchRequest {
    SearchRequest {
        token: chain::search_token(&states.get(w)),
        tag: keys.keyword_tag(kind, w),
    }
}

/// Cloud side: walk the chain, collect each pair's signature, multiply
/// them into the proof half. Exactly one table lookup per returned pair
/// and one group multiplication per pair after the first.
pub fn cloud_search(
    structure: &CloudStructure,
    request: &SearchRequest,
) -> Result<(Vec<(DocId, u64)>, G1Elem, CloudCost), SseError> {
    let result = chain::search(&structure.index, &request.token)?;
    let mut cost = CloudCost::default();
    let mut proof: Option<G1Elem> = None;
    for (id, i) in &result {
        let pos = position(&request.tag, id, *i);
        let sigma = structure.tsig.get(&pos).ok_or(SseError::IncompleteIndex)?;
        cost.lookups += 1;
        proof = Some(match proof {
            None => *sigma,
            Some(acc) => {
                cost.group_muls += 1;
                acc * *sigma
            }
        });
    }
    Ok((result, proof.unwrap_or_else(G1Elem::identity), cost))
}

/// Owner side: check the result length and index layout, then fold the ids
/// with their blinding factors. The blinding factors are bound to positions
/// 1..=count, so the indices must be exactly that sequence; any index game
/// reduces to substituting ids, which the signature check catches.
pub fn owner_proof(
    keys: &ForwardVKeys,
    kind: StructureKind,
    w: &Keyword,
    received: &[(DocId, u64)],
    states: &OwnerStates,
) -> Result<(Scalar, OwnerCost), ProofError> {
    let expected = states.count(w);
    if received.len() as u64 != expected {
        return Err(ProofError::CountMismatch { expected, got: received.len() as u64 });
    }
    for (slot, (_, i)) in received.iter().enumerate() {
        if *i != slot as u64 + 1 {
            return Err(ProofError::IndexMismatch);
        }
    }
    let seed = keys.keyword_seed(kind, w);
    let mut m = Scalar::zero();
    let mut cost = OwnerCost::default();
    for (id, i) in received {
        let r = prg_block(&seed, *i).expect("indices checked nonzero above");
        m = m + r * id.to_scalar();
        cost.mul_adds += 1;
    }
    Ok((m, cost))
}

/// Auditor side: two pairings, whatever the result size. Accepts iff
/// e(cloud_half, g2) = e(g1^owner_half, pk). The empty search degenerates
/// to identity = identity and accepts.
pub fn audit(pk: &G2Elem, proof: &SearchProof) -> (bool, AuditCost) {
    let lhs = pairing(&proof.cloud_half, &G2Elem::generator());
    let rhs = pairing(&G1Elem::generator().pow(proof.owner_half), pk);
    (lhs == rhs, AuditCost { pairings: 2 })
}

/// One keyword's share of an update: the chain entry plus the signature row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateEntry {
    pub chain: ChainToken,
    #[serde(with = "hex_pos")]
    pub position: [u8; 32],
    pub sigma: G1Elem,
}

mod hex_pos {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(pos: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(pos))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let mut pos = [0u8; 32];
        hex::decode_to_slice(&text, &mut pos).map_err(serde::de::Error::custom)?;
        Ok(pos)
    }
}

/// Everything the cloud must store for one document update: one entry per
/// keyword of the document, routed to the add or del structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FwdUpdateToken {
    pub kind: StructureKind,
    pub entries: Vec<UpdateEntry>,
}

/// Advances each keyword's state and emits the cloud-bound token. Nothing
/// in the token is recomputable from past search transcripts: the chain
/// entry comes from a fresh random state, and the position hides behind
/// the never-revealed new index and, for fresh documents, a new id.
pub fn update_token<R: RngCore + CryptoRng>(
    keys: &ForwardVKeys,
    kind: StructureKind,
    id: &DocId,
    kws: &[Keyword],
    states: &mut OwnerStates,
    rng: &mut R,
) -> Result<FwdUpdateToken, SseError> {
    if kws.is_empty() {
        return Err(SseError::EmptyKeyword);
    }
    let mut entries = Vec::with_capacity(kws.len());
    for (a, w) in kws.iter().enumerate() {
        if kws[..a].contains(w) {
            return Err(SseError::DuplicatePosting);
        }
        let state = states.get(w);
        let (chain_token, next) = chain::update_token(&state, id, rng);
        let i = next.counter;
        let tag = keys.keyword_tag(kind, w);
        let seed = keys.keyword_seed(kind, w);
        let m = pair_message(&seed, id, i)?;
        entries.push(UpdateEntry {
            chain: chain_token,
            position: position(&tag, id, i),
            sigma: sign(keys.signing_key(), m),
        });
        states.0.insert(w.clone(), next);
    }
    Ok(FwdUpdateToken { kind, entries })
}

/// Cloud side: file every entry. Both structures grow by one row per
/// keyword of the document.
pub fn apply_update(structure: &mut CloudStructure, token: &FwdUpdateToken) -> Result<(), SseError> {
    for entry in &token.entries {
        chain::apply(&mut structure.index, &entry.chain)?;
        structure.tsig.insert_new(entry.position, entry.sigma)?;
    }
    Ok(())
}

/// Why a verified search was rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectReason {
    /// Result length or index layout disagrees with the owner's counter.
    CountMismatch,
    /// The pairing equation failed.
    PairingFail,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SearchOutcome {
    #[error(transparent)]
    Backend(#[from] SseError),
    #[error("search rejected: {0:?}")]
    Rejected(RejectReason),
}

/// Both structures of the deletion-capable scheme, as the cloud holds them.
#[derive(Clone, Default, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinCloud {
    pub add: CloudStructure,
    pub del: CloudStructure,
}

impl TwinCloud {
    pub fn structure(&self, kind: StructureKind) -> &CloudStructure {
        match kind {
            StructureKind::Add => &self.add,
            StructureKind::Del => &self.del,
        }
    }

    pub fn apply(&mut self, token: &FwdUpdateToken) -> Result<(), SseError> {
        let structure = match token.kind {
            StructureKind::Add => &mut self.add,
            StructureKind::Del => &mut self.del,
        };
        apply_update(structure, token)
    }
}

/// Owner-side bookkeeping for both structures plus the pair ledger that
/// keeps additions and deletions well-formed.
#[derive(Clone, Default, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwinStates {
    pub add: OwnerStates,
    pub del: OwnerStates,
    ledger: BTreeMap<(Keyword, DocId), PairStatus>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum PairStatus {
    Live,
    Deleted,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LedgerError {
    #[error("pair already added")]
    DuplicateAdd,
    #[error("pair was never added or is already deleted")]
    DeleteWithoutAdd,
}

impl TwinStates {
    pub fn states(&self, kind: StructureKind) -> &OwnerStates {
        match kind {
            StructureKind::Add => &self.add,
            StructureKind::Del => &self.del,
        }
    }

    pub fn states_mut(&mut self, kind: StructureKind) -> &mut OwnerStates {
        match kind {
            StructureKind::Add => &mut self.add,
            StructureKind::Del => &mut self.del,
        }
    }

    /// Records an intended update, enforcing that a pair is added at most
    /// once and deleted only while live. Deletion is terminal for a pair:
    /// the del structure never forgets.
    pub fn record(
        &mut self,
        kind: StructureKind,
        w: &Keyword,
        id: &DocId,
    ) -> Result<(), LedgerError> {
        let key = (w.clone(), *id);
        let status = self.ledger.get(&key).copied();
        match kind {
            StructureKind::Add => {
                if status.is_some() {
                    return Err(LedgerError::DuplicateAdd);
                }
                self.ledger.insert(key, PairStatus::Live);
            }
            StructureKind::Del => {
                if status != Some(PairStatus::Live) {
                    return Err(LedgerError::DeleteWithoutAdd);
                }
                self.ledger.insert(key, PairStatus::Deleted);
            }
        }
        Ok(())
    }

    pub fn live_pairs(&self) -> usize {
        self.ledger.values().filter(|s| **s == PairStatus::Live).count()
    }
}

/// Owner-driven update against local twin structures: ledger check, token,
/// apply. The per-keyword ledger check runs before any state advances.
pub fn twin_update<R: RngCore + CryptoRng>(
    keys: &ForwardVKeys,
    kind: StructureKind,
    id: &DocId,
    kws: &[Keyword],
    states: &mut TwinStates,
    cloud: &mut TwinCloud,
    rng: &mut R,
) -> Result<(), TwinUpdateError> {
    for w in kws {
        states.record(kind, w, id)?;
    }
    let token = update_token(keys, kind, id, kws, states.states_mut(kind), rng)?;
    cloud.apply(&token)?;
    Ok(())
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TwinUpdateError {
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Backend(#[from] SseError),
}

/// A fully verified search over both structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifiedResult {
    /// Live ids: additions minus deletions, in insertion order.
    pub ids: Vec<DocId>,
    pub add_proof: SearchProof,
    pub del_proof: SearchProof,
}

/// End-to-end verified search against local twin structures. Runs the
/// token, cloud, proof, and audit steps on the add and del structures
/// independently; only if both audits accept does the difference of the
/// two result sets come back.
pub fn twin_search(
    keys: &ForwardVKeys,
    w: &Keyword,
    states: &TwinStates,
    cloud: &TwinCloud,
) -> Result<VerifiedResult, SearchOutcome> {
    let mut proofs = Vec::with_capacity(2);
    let mut results = Vec::with_capacity(2);
    for kind in [StructureKind::Add, StructureKind::Del] {
        let request = search_request(keys, kind, w, states.states(kind));
        let (result, cloud_half, _) = cloud_search(cloud.structure(kind), &request)?;
        let (owner_half, _) = owner_proof(keys, kind, w, &result, states.states(kind))
            .map_err(|_| SearchOutcome::Rejected(RejectReason::CountMismatch))?;
        let proof = SearchProof { cloud_half, owner_half };
        let (ok, _) = audit(&keys.public_key(), &proof);
        if !ok {
            return Err(SearchOutcome::Rejected(RejectReason::PairingFail));
        }
        proofs.push(proof);
        results.push(result);
    }
    let deleted: std::collections::HashSet<DocId> =
        results[1].iter().map(|(id, _)| *id).collect();
    let ids = results[0]
        .iter()
        .map(|(id, _)| *id)
        .filter(|id| !deleted.contains(id))
        .collect();
    Ok(VerifiedResult { ids, add_proof: proofs[0], del_proof: proofs[1] })
}
