//! Owner, cloud, and auditor as message-driven roles, plus the session
//! runner and the soundness suite.
//!
//! The runner owns the choreography: every envelope a role emits crosses
//! the transport before the addressee sees it, and lands in the transcript.
//! The runner also keeps a plaintext mirror of the database as referee
//! truth, so a report can say not just "the verdict was accept" but
//! "the verdict was accept and the result was actually right". An accepted
//! search whose result differs from the mirror is an accepted forgery,
//! the event the soundness suite exists to count.

use std::collections::{BTreeMap, BTreeSet};

use rand::{CryptoRng, Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::backend::{DocId, Keyword, PlainDb, SseError};
use crate::crypto::{hash_to_scalar, G1Elem, G2Elem};
use crate::signed::{
    self, CloudStructure, ForwardVKeys, LedgerError, RejectReason, SearchProof, StructureKind,
    TwinCloud, TwinStates,
};

use super::messages::{Body, Envelope, Party, ScriptOp, Transcript};
use super::transport::Transport;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("transport: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Backend(#[from] SseError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("protocol violation: {0}")]
    Protocol(String),
}

/// How the cloud behaves. Every strategy except the first tampers with
/// search handling in one specific way; all are deterministic given the
/// seed the cloud role was created with.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    /// Follows the protocol.
    Honest,
    /// Omits the last pair of the result and aggregates only the rest.
    DropOne,
    /// Answers with the complete stored answer of the previous search.
    ReplayOtherKeyword,
    /// Flips one bit in one returned id, keeping the honest proof.
    FlipIdBit,
    /// Sends a random group element as its proof half.
    ForgeProof,
    /// Discards every update, then answers searches from its stale store.
    StaleIgnoreUpdate,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Honest,
        Strategy::DropOne,
        Strategy::ReplayOtherKeyword,
        Strategy::FlipIdBit,
        Strategy::ForgeProof,
        Strategy::StaleIgnoreUpdate,
    ];

    pub const TAMPERING: [Strategy; 5] = [
        Strategy::DropOne,
        Strategy::ReplayOtherKeyword,
        Strategy::FlipIdBit,
        Strategy::ForgeProof,
        Strategy::StaleIgnoreUpdate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Honest => "HONEST",
            Strategy::DropOne => "DROP_ONE",
            Strategy::ReplayOtherKeyword => "REPLAY_OTHER_KEYWORD",
            Strategy::FlipIdBit => "FLIP_ID_BIT",
            Strategy::ForgeProof => "FORGE_PROOF",
            Strategy::StaleIgnoreUpdate => "STALE_IGNORE_UPDATE",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let upper = s.to_ascii_uppercase();
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == upper)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

/// The data owner: holds all keys and the twin states, issues tokens,
/// verifies result shapes, and acts on verdicts.
pub struct OwnerRole {
    keys: ForwardVKeys,
    states: TwinStates,
    pending: Option<Pending>,
}

struct Pending {
    session: u64,
    /// The result the owner will act on if the verdict accepts: additions
    /// minus deletions as the cloud reported them.
    candidate: Option<Vec<DocId>>,
}

impl OwnerRole {
    pub fn new(keys: ForwardVKeys) -> Self {
        OwnerRole { keys, states: TwinStates::default(), pending: None }
    }

    pub fn public_key(&self) -> G2Elem {
        self.keys.public_key()
    }

    /// Builds both structures from the initial database and emits the
    /// upload. The build runs the update path once per pair, so built and
    /// incrementally grown stores have the same shape.
    pub fn build_upload<R: RngCore + CryptoRng>(
        &mut self,
        db: &PlainDb,
        rng: &mut R,
    ) -> Result<Envelope, SimError> {
        let mut add = CloudStructure::default();
        for (w, ids) in db.iter() {
            for id in ids {
                self.states.record(StructureKind::Add, w, id)?;
                let token = signed::update_token(
                    &self.keys,
                    StructureKind::Add,
                    id,
                    std::slice::from_ref(w),
                    self.states.states_mut(StructureKind::Add),
                    rng,
                )?;
                signed::apply_update(&mut add, &token)?;
            }
        }
        Ok(Envelope {
            from: Party::Owner,
            to: Party::Cloud,
            session: 0,
            body: Body::BuildUpload { add, del: CloudStructure::default() },
        })
    }

    pub fn start_search(&mut self, w: &Keyword, session: u64) -> Envelope {
        self.pending = Some(Pending { session, candidate: None });
        Envelope {
            from: Party::Owner,
            to: Party::Cloud,
            session,
            body: Body::SearchRequest {
                add: signed::search_request(&self.keys, StructureKind::Add, w, &self.states.add),
                del: signed::search_request(&self.keys, StructureKind::Del, w, &self.states.del),
            },
        }
    }

    /// Consumes the cloud's result: checks both structures' shapes, folds
    /// the proof halves, and remembers the candidate ids. A half that
    /// fails the shape check is sent as absent, which the auditor treats
    /// as the owner's own rejection.
    pub fn handle_result(&mut self, env: Envelope, w: &Keyword) -> Result<Envelope, SimError> {
        let Body::SearchResult { add, del } = env.body else {
            return Err(SimError::Protocol(format!(
                "owner expected SearchResult, got {}",
                env.body.kind_name()
            )));
        };
        let pending = self
            .pending
            .as_mut()
            .ok_or_else(|| SimError::Protocol("result with no open search".into()))?;
        if env.session != pending.session {
            return Err(SimError::Protocol("result for a different session".into()));
        }

        let add_half =
            signed::owner_proof(&self.keys, StructureKind::Add, w, &add, &self.states.add)
                .ok()
                .map(|(m, _)| m);
        let del_half =
            signed::owner_proof(&self.keys, StructureKind::Del, w, &del, &self.states.del)
                .ok()
                .map(|(m, _)| m);

        if add_half.is_some() && del_half.is_some() {
            let deleted: BTreeSet<DocId> = del.iter().map(|(id, _)| *id).collect();
            pending.candidate = Some(
                add.iter().map(|(id, _)| *id).filter(|id| !deleted.contains(id)).collect(),
            );
        }

        Ok(Envelope {
            from: Party::Owner,
            to: Party::Auditor,
            session: env.session,
            body: Body::ProofOwner { add: add_half, del: del_half },
        })
    }

    /// Closes the search: on accept the candidate becomes the result the
    /// owner acts on, on reject nothing does.
    pub fn handle_verdict(
        &mut self,
        env: Envelope,
    ) -> Result<(bool, Option<RejectReason>, Option<Vec<DocId>>), SimError> {
        let Body::Verdict { accept, reason } = env.body else {
            return Err(SimError::Protocol(format!(
                "owner expected Verdict, got {}",
                env.body.kind_name()
            )));
        };
        let pending = self
            .pending
            .take()
            .ok_or_else(|| SimError::Protocol("verdict with no open search".into()))?;
        if env.session != pending.session {
            return Err(SimError::Protocol("verdict for a different session".into()));
        }
        let returned = if accept { pending.candidate } else { None };
        Ok((accept, reason, returned))
    }

    pub fn update<R: RngCore + CryptoRng>(
        &mut self,
        kind: StructureKind,
        id: &DocId,
        kws: &[Keyword],
        session: u64,
        rng: &mut R,
    ) -> Result<Envelope, SimError> {
        for w in kws {
            self.states.record(kind, w, id)?;
        }
        let token =
            signed::update_token(&self.keys, kind, id, kws, self.states.states_mut(kind), rng)?;
        Ok(Envelope {
            from: Party::Owner,
            to: Party::Cloud,
            session,
            body: Body::UpdateUpload { doc: hex::encode(id.name()), token },
        })
    }
}

/// The storage server. Holds the twin structures and answers according to
/// its strategy.
pub struct CloudRole {
    twin: TwinCloud,
    strategy: Strategy,
    rng: ChaCha20Rng,
    stored: Option<StoredAnswer>,
}

#[derive(Clone)]
struct StoredAnswer {
    add: (Vec<(DocId, u64)>, G1Elem),
    del: (Vec<(DocId, u64)>, G1Elem),
}

/// Walks one structure; a cloud whose store cannot satisfy the token
/// answers empty rather than admitting anything.
fn best_effort_answer(
    structure: &CloudStructure,
    request: &signed::SearchRequest,
) -> ((Vec<(DocId, u64)>, G1Elem), bool) {
    match signed::cloud_search(structure, request) {
        Ok((result, proof, _)) => ((result, proof), false),
        Err(_) => ((Vec::new(), G1Elem::identity()), true),
    }
}

/// Aggregates whatever signatures the structure still holds for `pairs`.
/// A cheating cloud uses this to keep its proof consistent with a result
/// it shortened.
fn aggregate(structure: &CloudStructure, tag: &crate::crypto::SymKey, pairs: &[(DocId, u64)]) -> G1Elem {
    let mut proof = G1Elem::identity();
    for (id, i) in pairs {
        if let Some(sigma) = structure.tsig.get(&signed::position(tag, id, *i)) {
            proof = proof * *sigma;
        }
    }
    proof
}

impl CloudRole {
    pub fn new(strategy: Strategy, seed: u64) -> Self {
        CloudRole {
            twin: TwinCloud::default(),
            strategy,
            rng: ChaCha20Rng::seed_from_u64(seed),
            stored: None,
        }
    }

    pub fn handle_build(&mut self, env: Envelope) -> Result<(), SimError> {
        let Body::BuildUpload { add, del } = env.body else {
            return Err(SimError::Protocol(format!(
                "cloud expected BuildUpload, got {}",
                env.body.kind_name()
            )));
        };
        self.twin = TwinCloud { add, del };
        Ok(())
    }

    pub fn handle_update(&mut self, env: Envelope) -> Result<(), SimError> {
        let Body::UpdateUpload { token, .. } = env.body else {
            return Err(SimError::Protocol(format!(
                "cloud expected UpdateUpload, got {}",
                env.body.kind_name()
            )));
        };
        if self.strategy == Strategy::StaleIgnoreUpdate {
            // Received, acknowledged, dropped on the floor.
            return Ok(());
        }
        self.twin.apply(&token)?;
        Ok(())
    }

    /// Answers a search. Returns the result for the owner, the proof for
    /// the auditor, and whether this answer was actually tampered with.
    pub fn handle_search(&mut self, env: Envelope) -> Result<(Envelope, Envelope, bool), SimError> {
        let session = env.session;
        let Body::SearchRequest { add: req_add, del: req_del } = env.body else {
            return Err(SimError::Protocol(format!(
                "cloud expected SearchRequest, got {}",
                env.body.kind_name()
            )));
        };

        let (honest_add, failed_add) = best_effort_answer(&self.twin.add, &req_add);
        let (honest_del, failed_del) = best_effort_answer(&self.twin.del, &req_del);

        let mut out_add = honest_add.clone();
        let mut out_del = honest_del.clone();
        let mut tampered = failed_add || failed_del;

        match self.strategy {
            Strategy::Honest | Strategy::StaleIgnoreUpdate => {}
            Strategy::DropOne => {
                if !out_add.0.is_empty() {
                    out_add.0.pop();
                    out_add.1 = aggregate(&self.twin.add, &req_add.tag, &out_add.0);
                    tampered = true;
                }
            }
            Strategy::ReplayOtherKeyword => {
                if let Some(prev) = &self.stored {
                    out_add = prev.add.clone();
                    out_del = prev.del.clone();
                    tampered = true;
                }
            }
            Strategy::FlipIdBit => {
                if !out_add.0.is_empty() {
                    out_add.0[0].0 .0[0] ^= 0x01;
                    tampered = true;
                }
            }
            Strategy::ForgeProof => {
                let mut noise = [0u8; 32];
                self.rng.fill_bytes(&mut noise);
                out_add.1 = G1Elem::generator().pow(hash_to_scalar(&noise));
                tampered = true;
            }
        }

        self.stored = Some(StoredAnswer { add: honest_add, del: honest_del });

        let result = Envelope {
            from: Party::Cloud,
            to: Party::Owner,
            session,
            body: Body::SearchResult { add: out_add.0, del: out_del.0 },
        };
        let proof = Envelope {
            from: Party::Cloud,
            to: Party::Auditor,
            session,
            body: Body::ProofCloud { add: out_add.1, del: out_del.1 },
        };
        Ok((result, proof, tampered))
    }
}

/// The third party. Knows only the public key; sees only proof halves.
pub struct AuditorRole {
    pk: G2Elem,
    pending: BTreeMap<u64, (G1Elem, G1Elem)>,
}

impl AuditorRole {
    pub fn new(pk: G2Elem) -> Self {
        AuditorRole { pk, pending: BTreeMap::new() }
    }

    pub fn handle_proof_cloud(&mut self, env: Envelope) -> Result<(), SimError> {
        let Body::ProofCloud { add, del } = env.body else {
            return Err(SimError::Protocol(format!(
                "auditor expected ProofCloud, got {}",
                env.body.kind_name()
            )));
        };
        self.pending.insert(env.session, (add, del));
        Ok(())
    }

    /// Joins the two proof halves into the verdict. An absent owner half
    /// means the owner already rejected the result's shape.
    pub fn handle_proof_owner(&mut self, env: Envelope) -> Result<Envelope, SimError> {
        let session = env.session;
        let Body::ProofOwner { add, del } = env.body else {
            return Err(SimError::Protocol(format!(
                "auditor expected ProofOwner, got {}",
                env.body.kind_name()
            )));
        };
        let (pc_add, pc_del) = self
            .pending
            .remove(&session)
            .ok_or_else(|| SimError::Protocol("owner proof before cloud proof".into()))?;

        let (accept, reason) = match (add, del) {
            (Some(owner_add), Some(owner_del)) => {
                let (ok_add, _) = signed::audit(
                    &self.pk,
                    &SearchProof { cloud_half: pc_add, owner_half: owner_add },
                );
                let (ok_del, _) = signed::audit(
                    &self.pk,
                    &SearchProof { cloud_half: pc_del, owner_half: owner_del },
                );
                if ok_add && ok_del {
                    (true, None)
                } else {
                    (false, Some(RejectReason::PairingFail))
                }
            }
            _ => (false, Some(RejectReason::CountMismatch)),
        };

        Ok(Envelope {
            from: Party::Auditor,
            to: Party::Owner,
            session,
            body: Body::Verdict { accept, reason },
        })
    }
}

/// Referee's plaintext mirror: what a search should return.
struct TruthOracle {
    added: BTreeMap<Keyword, Vec<DocId>>,
    deleted: BTreeMap<Keyword, BTreeSet<DocId>>,
}

impl TruthOracle {
    fn from_db(db: &PlainDb) -> Self {
        let mut added = BTreeMap::new();
        for (w, ids) in db.iter() {
            added.insert(w.clone(), ids.to_vec());
        }
        TruthOracle { added, deleted: BTreeMap::new() }
    }

    fn add(&mut self, w: &Keyword, id: DocId) {
        self.added.entry(w.clone()).or_default().push(id);
    }

    fn del(&mut self, w: &Keyword, id: DocId) {
        self.deleted.entry(w.clone()).or_default().insert(id);
    }

    fn truth(&self, w: &Keyword) -> Vec<DocId> {
        let deleted = self.deleted.get(w);
        self.added
            .get(w)
            .map(|ids| {
                ids.iter()
                    .filter(|id| deleted.map_or(true, |d| !d.contains(id)))
                    .copied()
                    .collect()
            })
            .unwrap_or_default()
    }
}

/// One search, as the referee saw it.
#[derive(Clone, Debug, Serialize)]
pub struct SearchRecord {
    pub session: u64,
    pub keyword: Keyword,
    pub accepted: bool,
    pub reason: Option<RejectReason>,
    /// What the owner acted on; absent when the verdict rejected.
    pub returned: Option<Vec<DocId>>,
    /// What the plaintext mirror says the answer is.
    pub truth: Vec<DocId>,
    /// Whether the cloud actually deviated on this answer.
    pub tampered: bool,
}

impl SearchRecord {
    /// The soundness event: a wrong result that was accepted.
    pub fn accepted_forgery(&self) -> bool {
        self.accepted && self.returned.as_deref() != Some(&self.truth)
    }
}

pub struct SessionReport {
    pub transcript: Transcript,
    pub searches: Vec<SearchRecord>,
    pub ops: usize,
}

/// Runs build plus the scripted operations against one cloud. Every
/// message crosses `transport` and is recorded.
pub fn run_session<R: RngCore + CryptoRng, T: Transport>(
    db: &PlainDb,
    script: &[ScriptOp],
    strategy: Strategy,
    rng: &mut R,
    transport: &mut T,
) -> Result<SessionReport, SimError> {
    let keys = ForwardVKeys::generate(rng);
    let mut owner = OwnerRole::new(keys);
    let mut cloud = CloudRole::new(strategy, rng.next_u64());
    let mut auditor = AuditorRole::new(owner.public_key());
    let mut oracle = TruthOracle::from_db(db);
    let mut transcript = Transcript::default();
    let mut searches = Vec::new();

    let mut relay = |env: Envelope, transcript: &mut Transcript| -> Result<Envelope, SimError> {
        let delivered = transport.relay(&env)?;
        transcript.entries.push(delivered.clone());
        Ok(delivered)
    };

    let env = owner.build_upload(db, rng)?;
    let env = relay(env, &mut transcript)?;
    cloud.handle_build(env)?;

    for (step, op) in script.iter().enumerate() {
        let session = step as u64 + 1;
        match op {
            ScriptOp::Search(w) => {
                let truth = oracle.truth(w);
                let req = owner.start_search(w, session);
                let req = relay(req, &mut transcript)?;
                let (result, proof_cloud, tampered) = cloud.handle_search(req)?;
                let result = relay(result, &mut transcript)?;
                let proof_cloud = relay(proof_cloud, &mut transcript)?;
                auditor.handle_proof_cloud(proof_cloud)?;
                let proof_owner = owner.handle_result(result, w)?;
                let proof_owner = relay(proof_owner, &mut transcript)?;
                let verdict = auditor.handle_proof_owner(proof_owner)?;
                let verdict = relay(verdict, &mut transcript)?;
                let (accepted, reason, returned) = owner.handle_verdict(verdict)?;
                searches.push(SearchRecord {
                    session,
                    keyword: w.clone(),
                    accepted,
                    reason,
                    returned,
                    truth,
                    tampered,
                });
            }
            ScriptOp::Add { id, kws } => {
                let env = owner.update(StructureKind::Add, id, kws, session, rng)?;
                let env = relay(env, &mut transcript)?;
                cloud.handle_update(env)?;
                for w in kws {
                    oracle.add(w, *id);
                }
            }
            ScriptOp::Del { id, kws } => {
                let env = owner.update(StructureKind::Del, id, kws, session, rng)?;
                let env = relay(env, &mut transcript)?;
                cloud.handle_update(env)?;
                for w in kws {
                    oracle.del(w, *id);
                }
            }
        }
    }

    Ok(SessionReport { transcript, searches, ops: script.len() })
}

/// Per-strategy tallies across a suite run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StrategyOutcome {
    pub sessions: u64,
    pub ops: u64,
    pub searches: u64,
    pub accepts: u64,
    pub tampered_searches: u64,
    pub accepted_forgeries: u64,
    pub reject_reasons: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessReport {
    pub trials: u64,
    pub outcomes: BTreeMap<Strategy, StrategyOutcome>,
}

impl std::fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:<22} {:>8} {:>9} {:>8} {:>9} {:>8}  reasons",
            "strategy", "sessions", "searches", "accepts", "tampered", "forged"
        )?;
        for (strategy, o) in &self.outcomes {
            let reasons = if o.reject_reasons.is_empty() {
                "-".to_string()
            } else {
                o.reject_reasons
                    .iter()
                    .map(|(r, n)| format!("{r}={n}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            writeln!(
                f,
                "{:<22} {:>8} {:>9} {:>8} {:>9} {:>8}  {}",
                strategy.name(),
                o.sessions,
                o.searches,
                o.accepts,
                o.tampered_searches,
                o.accepted_forgeries,
                reasons
            )?;
        }
        Ok(())
    }
}

fn fresh_id<R: RngCore>(rng: &mut R) -> DocId {
    let mut id = [0u8; 16];
    rng.fill_bytes(&mut id);
    DocId(id)
}

fn gen_db<R: RngCore>(rng: &mut R, n_kw: usize, max_per_kw: usize) -> PlainDb {
    let mut db = PlainDb::new();
    for k in 0..n_kw {
        let w = Keyword::new(format!("w{k}")).expect("short keyword");
        for _ in 0..rng.gen_range(1..=max_per_kw) {
            db.insert(w.clone(), fresh_id(rng)).expect("fresh ids are distinct");
        }
    }
    db
}

/// Builds a database and script that make the given strategy's tamper
/// actually fire at least once.
fn strategy_scenario<R: RngCore>(strategy: Strategy, rng: &mut R) -> (PlainDb, Vec<ScriptOp>) {
    match strategy {
        Strategy::Honest => {
            let n_kw = rng.gen_range(2..=4);
            let db = gen_db(rng, n_kw, 4);
            let keywords: Vec<Keyword> = db.keywords().cloned().collect();
            let mut script: Vec<ScriptOp> =
                keywords.iter().cloned().map(ScriptOp::Search).collect();
            // Grow the database mid-session, re-search, then delete one
            // built pair and search it again.
            for _ in 0..3 {
                let w = keywords[rng.gen_range(0..keywords.len())].clone();
                script.push(ScriptOp::Add { id: fresh_id(rng), kws: vec![w.clone()] });
                script.push(ScriptOp::Search(w));
            }
            let victim = keywords[rng.gen_range(0..keywords.len())].clone();
            let doomed = db.postings(&victim)[0];
            script.push(ScriptOp::Del { id: doomed, kws: vec![victim.clone()] });
            script.push(ScriptOp::Search(victim));
            (db, script)
        }
        Strategy::DropOne
        | Strategy::FlipIdBit
        | Strategy::ForgeProof
        | Strategy::ReplayOtherKeyword => {
            let n_kw = rng.gen_range(2..=4);
            let db = gen_db(rng, n_kw, 4);
            let script = db.keywords().cloned().map(ScriptOp::Search).collect();
            (db, script)
        }
        Strategy::StaleIgnoreUpdate => {
            let db = gen_db(rng, 2, 3);
            let w = db.keywords().next().cloned().expect("db has keywords");
            let script = vec![
                ScriptOp::Add { id: fresh_id(rng), kws: vec![w.clone()] },
                ScriptOp::Search(w),
            ];
            (db, script)
        }
    }
}

/// Runs `trials` randomized sessions for every strategy and tallies the
/// outcomes. The number that matters is `accepted_forgeries`: it must be
/// zero everywhere, while the honest strategy must accept everything.
pub fn soundness_suite<R: RngCore + CryptoRng>(
    trials: u64,
    rng: &mut R,
) -> Result<SoundnessReport, SimError> {
    let mut outcomes: BTreeMap<Strategy, StrategyOutcome> = BTreeMap::new();
    for strategy in Strategy::ALL {
        let outcome = outcomes.entry(strategy).or_default();
        for _ in 0..trials {
            let (db, script) = strategy_scenario(strategy, rng);
            let mut transport = super::transport::InProcess::new();
            let report = run_session(&db, &script, strategy, rng, &mut transport)?;
            outcome.sessions += 1;
            outcome.ops += report.ops as u64;
            for record in &report.searches {
                outcome.searches += 1;
                if record.accepted {
                    outcome.accepts += 1;
                }
                if record.tampered {
                    outcome.tampered_searches += 1;
                }
                if record.accepted_forgery() {
                    outcome.accepted_forgeries += 1;
                }
                if let Some(reason) = record.reason {
                    *outcome.reject_reasons.entry(format!("{reason:?}")).or_default() += 1;
                }
            }
        }
    }
    Ok(SoundnessReport { trials, outcomes })
}
