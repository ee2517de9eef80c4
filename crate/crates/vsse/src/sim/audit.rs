//! Transcript audits: the leakage profile check and the forward-privacy
//! recomputation check.
//!
//! The leakage audit works on the raw JSON lines, not on deserialized
//! structs. Deserialization would silently drop an extra field; the audit
//! must instead flag it, because an extra field is exactly how a leak
//! would look in a transcript. Every message kind therefore has a closed
//! field list with a shape validator per field, and anything outside it
//! fails with the offending path.
//!
//! The forward-privacy audit plays the curious cloud: it collects every
//! value a search reveals (position tags, result ids, counters, chain
//! heads) and tries to recompute the addresses of later update messages
//! from them. Any hit would tie an update to a previously searched
//! keyword before the next search, which is precisely what the scheme
//! promises never happens.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use crate::backend::DocId;
use crate::crypto::{tagged_hash, tags, SymKey};
use crate::signed::{position, StructureKind};

use super::messages::{Body, Transcript};

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum LeakageViolation {
    #[error("line {line}: not a JSON object: {error}")]
    Malformed { line: usize, error: String },
    #[error("line {line}: field outside the leakage profile: {path}")]
    UnexpectedField { line: usize, path: String },
    #[error("line {line}: missing field {path}")]
    MissingField { line: usize, path: String },
    #[error("line {line}: {path} is not {expected}")]
    BadValue { line: usize, path: String, expected: &'static str },
    #[error("line {line}: {kind} routed {from} to {to}")]
    BadRouting { line: usize, kind: String, from: String, to: String },
    #[error("session {session}: {detail}")]
    BadShape { session: u64, detail: String },
}

/// What a clean transcript amounts to.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeakageProfile {
    pub lines: usize,
    pub sessions: usize,
    pub kind_counts: BTreeMap<String, u64>,
}

fn is_lower_hex(s: &str, chars: usize) -> bool {
    s.len() == chars && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

fn check_keys(
    line: usize,
    obj: &serde_json::Map<String, Value>,
    path: &str,
    allowed: &[&str],
) -> Result<(), LeakageViolation> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(LeakageViolation::UnexpectedField { line, path: format!("{path}.{k}") });
        }
    }
    for a in allowed {
        if !obj.contains_key(*a) {
            return Err(LeakageViolation::MissingField { line, path: format!("{path}.{a}") });
        }
    }
    Ok(())
}

fn check_hex(
    line: usize,
    v: &Value,
    path: String,
    chars: usize,
    what: &'static str,
) -> Result<(), LeakageViolation> {
    match v.as_str() {
        Some(s) if is_lower_hex(s, chars) => Ok(()),
        _ => Err(LeakageViolation::BadValue { line, path, expected: what }),
    }
}

fn check_u64(line: usize, v: &Value, path: String) -> Result<(), LeakageViolation> {
    if v.as_u64().is_some() {
        Ok(())
    } else {
        Err(LeakageViolation::BadValue { line, path, expected: "an unsigned integer" })
    }
}

/// One cloud structure as uploaded: encrypted index rows plus the
/// signature table. Locations and positions are 32 bytes, index entries
/// 48 bytes, signatures 48-byte group elements.
fn check_structure(
    line: usize,
    v: &Value,
    path: String,
) -> Result<(), LeakageViolation> {
    let obj = v
        .as_object()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: path.clone(), expected: "an object" })?;
    check_keys(line, obj, &path, &["index", "tsig"])?;
    let index = obj["index"]
        .as_object()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: format!("{path}.index"), expected: "an object" })?;
    for (k, val) in index {
        if !is_lower_hex(k, 64) {
            return Err(LeakageViolation::BadValue {
                line,
                path: format!("{path}.index.{k}"),
                expected: "a 32-byte hex location",
            });
        }
        check_hex(line, val, format!("{path}.index.{k}"), 96, "a 48-byte hex index entry")?;
    }
    let tsig = obj["tsig"]
        .as_object()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: format!("{path}.tsig"), expected: "an object" })?;
    check_keys(line, tsig, &format!("{path}.tsig"), &["entries"])?;
    let entries = tsig["entries"]
        .as_object()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: format!("{path}.tsig.entries"), expected: "an object" })?;
    for (k, val) in entries {
        if !is_lower_hex(k, 64) {
            return Err(LeakageViolation::BadValue {
                line,
                path: format!("{path}.tsig.entries.{k}"),
                expected: "a 32-byte hex position",
            });
        }
        check_hex(line, val, format!("{path}.tsig.entries.{k}"), 96, "a compressed group element")?;
    }
    Ok(())
}

/// One search request half: newest chain head, walk count, position tag.
fn check_request_half(line: usize, v: &Value, path: String) -> Result<(), LeakageViolation> {
    let obj = v
        .as_object()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: path.clone(), expected: "an object" })?;
    check_keys(line, obj, &path, &["token", "tag"])?;
    let token = obj["token"]
        .as_object()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: format!("{path}.token"), expected: "an object" })?;
    check_keys(line, token, &format!("{path}.token"), &["head", "count"])?;
    check_hex(line, &token["head"], format!("{path}.token.head"), 64, "a 32-byte hex state")?;
    check_u64(line, &token["count"], format!("{path}.token.count"))?;
    check_hex(line, &obj["tag"], format!("{path}.tag"), 64, "a 32-byte hex key")?;
    Ok(())
}

/// One result half: a list of (id, insertion index) pairs.
fn check_result_half(line: usize, v: &Value, path: String) -> Result<(), LeakageViolation> {
    let arr = v
        .as_array()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: path.clone(), expected: "an array" })?;
    for (n, pair) in arr.iter().enumerate() {
        let ppath = format!("{path}[{n}]");
        let pair = pair
            .as_array()
            .ok_or_else(|| LeakageViolation::BadValue { line, path: ppath.clone(), expected: "a pair" })?;
        if pair.len() != 2 {
            return Err(LeakageViolation::BadValue { line, path: ppath, expected: "a pair" });
        }
        check_hex(line, &pair[0], format!("{ppath}[0]"), 32, "a 16-byte hex id")?;
        check_u64(line, &pair[1], format!("{ppath}[1]"))?;
    }
    Ok(())
}

fn check_update_token(line: usize, v: &Value, path: String) -> Result<(), LeakageViolation> {
    let obj = v
        .as_object()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: path.clone(), expected: "an object" })?;
    check_keys(line, obj, &path, &["kind", "entries"])?;
    match obj["kind"].as_str() {
        Some("Add") | Some("Del") => {}
        _ => {
            return Err(LeakageViolation::BadValue {
                line,
                path: format!("{path}.kind"),
                expected: "Add or Del",
            })
        }
    }
    let entries = obj["entries"]
        .as_array()
        .ok_or_else(|| LeakageViolation::BadValue { line, path: format!("{path}.entries"), expected: "an array" })?;
    for (n, entry) in entries.iter().enumerate() {
        let epath = format!("{path}.entries[{n}]");
        let entry = entry
            .as_object()
            .ok_or_else(|| LeakageViolation::BadValue { line, path: epath.clone(), expected: "an object" })?;
        check_keys(line, entry, &epath, &["chain", "position", "sigma"])?;
        let chain = entry["chain"]
            .as_object()
            .ok_or_else(|| LeakageViolation::BadValue { line, path: format!("{epath}.chain"), expected: "an object" })?;
        check_keys(line, chain, &format!("{epath}.chain"), &["location", "masked_id", "prev_link"])?;
        check_hex(line, &chain["location"], format!("{epath}.chain.location"), 64, "a 32-byte hex location")?;
        check_hex(line, &chain["masked_id"], format!("{epath}.chain.masked_id"), 32, "a 16-byte hex mask")?;
        check_hex(line, &chain["prev_link"], format!("{epath}.chain.prev_link"), 64, "a 32-byte hex link")?;
        check_hex(line, &entry["position"], format!("{epath}.position"), 64, "a 32-byte hex position")?;
        check_hex(line, &entry["sigma"], format!("{epath}.sigma"), 96, "a compressed group element")?;
    }
    Ok(())
}

const PARTIES: [&str; 3] = ["Owner", "Cloud", "Auditor"];

/// Expected sender and receiver per message kind.
fn routing(kind: &str) -> Option<(&'static str, &'static str)> {
    match kind {
        "BuildUpload" | "SearchRequest" | "UpdateUpload" => Some(("Owner", "Cloud")),
        "SearchResult" => Some(("Cloud", "Owner")),
        "ProofCloud" => Some(("Cloud", "Auditor")),
        "ProofOwner" => Some(("Owner", "Auditor")),
        "Verdict" => Some(("Auditor", "Owner")),
        _ => None,
    }
}

/// Checks a transcript, line by line, against the declared leakage
/// profile. Everything a message is allowed to carry is listed here;
/// an extra field, a value of the wrong shape, or a message routed to
/// the wrong party fails with its location.
pub fn leakage_audit(jsonl: &str) -> Result<LeakageProfile, LeakageViolation> {
    let mut profile = LeakageProfile::default();
    let mut session_kinds: BTreeMap<u64, Vec<String>> = BTreeMap::new();

    for (n, text) in jsonl.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let line = n + 1;
        profile.lines += 1;
        let value: Value = serde_json::from_str(text)
            .map_err(|e| LeakageViolation::Malformed { line, error: e.to_string() })?;
        let env = value
            .as_object()
            .ok_or_else(|| LeakageViolation::Malformed { line, error: "not an object".into() })?;
        check_keys(line, env, "envelope", &["from", "to", "session", "body"])?;

        let from = env["from"].as_str().unwrap_or_default().to_string();
        let to = env["to"].as_str().unwrap_or_default().to_string();
        for (v, path) in [(&from, "envelope.from"), (&to, "envelope.to")] {
            if !PARTIES.contains(&v.as_str()) {
                return Err(LeakageViolation::BadValue { line, path: path.into(), expected: "a party name" });
            }
        }
        check_u64(line, &env["session"], "envelope.session".into())?;
        let session = env["session"].as_u64().unwrap();

        let body = env["body"]
            .as_object()
            .ok_or_else(|| LeakageViolation::BadValue { line, path: "envelope.body".into(), expected: "an object" })?;
        let kind = body
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| LeakageViolation::MissingField { line, path: "envelope.body.kind".into() })?
            .to_string();

        let Some((want_from, want_to)) = routing(&kind) else {
            return Err(LeakageViolation::BadValue {
                line,
                path: "envelope.body.kind".into(),
                expected: "a known message kind",
            });
        };
        if from != want_from || to != want_to {
            return Err(LeakageViolation::BadRouting { line, kind, from, to });
        }

        match kind.as_str() {
            "BuildUpload" => {
                check_keys(line, body, "body", &["kind", "add", "del"])?;
                check_structure(line, &body["add"], "body.add".into())?;
                check_structure(line, &body["del"], "body.del".into())?;
            }
            "SearchRequest" => {
                check_keys(line, body, "body", &["kind", "add", "del"])?;
                check_request_half(line, &body["add"], "body.add".into())?;
                check_request_half(line, &body["del"], "body.del".into())?;
            }
            "SearchResult" => {
                check_keys(line, body, "body", &["kind", "add", "del"])?;
                check_result_half(line, &body["add"], "body.add".into())?;
                check_result_half(line, &body["del"], "body.del".into())?;
            }
            "ProofCloud" => {
                check_keys(line, body, "body", &["kind", "add", "del"])?;
                check_hex(line, &body["add"], "body.add".into(), 96, "a compressed group element")?;
                check_hex(line, &body["del"], "body.del".into(), 96, "a compressed group element")?;
            }
            "ProofOwner" => {
                check_keys(line, body, "body", &["kind", "add", "del"])?;
                for half in ["add", "del"] {
                    if !body[half].is_null() {
                        check_hex(line, &body[half], format!("body.{half}"), 64, "a hex scalar or null")?;
                    }
                }
            }
            "Verdict" => {
                check_keys(line, body, "body", &["kind", "accept", "reason"])?;
                if !body["accept"].is_boolean() {
                    return Err(LeakageViolation::BadValue { line, path: "body.accept".into(), expected: "a boolean" });
                }
                match body["reason"].as_str() {
                    _ if body["reason"].is_null() => {}
                    Some("CountMismatch") | Some("PairingFail") => {}
                    _ => {
                        return Err(LeakageViolation::BadValue {
                            line,
                            path: "body.reason".into(),
                            expected: "a reject reason or null",
                        })
                    }
                }
            }
            "UpdateUpload" => {
                check_keys(line, body, "body", &["kind", "doc", "token"])?;
                check_hex(line, &body["doc"], "body.doc".into(), 64, "a 32-byte hex document name")?;
                check_update_token(line, &body["token"], "body.token".into())?;
            }
            _ => unreachable!("routing() filtered unknown kinds"),
        }

        *profile.kind_counts.entry(kind.clone()).or_default() += 1;
        session_kinds.entry(session).or_default().push(kind);
    }

    // Per-session shape: a session is one build, one update, or one
    // complete verified search.
    profile.sessions = session_kinds.len();
    for (session, mut kinds) in session_kinds {
        kinds.sort();
        let ok = kinds == ["BuildUpload"]
            || kinds == ["UpdateUpload"]
            || kinds
                == ["ProofCloud", "ProofOwner", "SearchRequest", "SearchResult", "Verdict"];
        if !ok {
            return Err(LeakageViolation::BadShape {
                session,
                detail: format!("unexpected message set {kinds:?}"),
            });
        }
    }

    Ok(profile)
}

/// What the forward-privacy audit tried and found. `matches` must stay
/// empty: an entry means an update message was linkable to an earlier
/// search from transcript data alone.
#[derive(Clone, Debug, Default)]
pub struct FwdPrivacyReport {
    /// Addition entries that arrived after at least one search.
    pub updates_audited: u64,
    /// Candidate positions and locations recomputed against them.
    pub recomputed: u64,
    pub matches: Vec<String>,
}

impl FwdPrivacyReport {
    pub fn is_clean(&self) -> bool {
        self.matches.is_empty()
    }
}

/// Replays the transcript as the curious cloud. Collects everything a
/// search reveals, then tries to recompute every later addition entry's
/// position from revealed tags, ids, and plausible indices, and its chain
/// location from revealed heads. Deletion updates are out of scope: a
/// deletion names a previously returned document on purpose.
pub fn forward_privacy_audit(transcript: &Transcript) -> FwdPrivacyReport {
    let mut report = FwdPrivacyReport::default();
    let mut tags: BTreeSet<[u8; 32]> = BTreeSet::new();
    let mut heads: BTreeSet<[u8; 32]> = BTreeSet::new();
    let mut ids: BTreeSet<[u8; 16]> = BTreeSet::new();
    let mut horizon: u64 = 0;

    for env in &transcript.entries {
        match &env.body {
            Body::SearchRequest { add, del } => {
                for half in [add, del] {
                    tags.insert(half.tag.0);
                    heads.insert(half.token.head);
                    horizon = horizon.max(half.token.count);
                }
            }
            Body::SearchResult { add, del } => {
                for (id, i) in add.iter().chain(del.iter()) {
                    ids.insert(id.0);
                    horizon = horizon.max(*i);
                }
            }
            Body::UpdateUpload { token, .. } if token.kind == StructureKind::Add => {
                if tags.is_empty() {
                    continue;
                }
                // Indices a fresh entry could plausibly land on: anything
                // up to every counter seen so far plus this token's own
                // growth, padded.
                let reach = horizon + token.entries.len() as u64 + 4;
                for entry in &token.entries {
                    report.updates_audited += 1;
                    for tag in &tags {
                        let tag = SymKey(*tag);
                        for id in &ids {
                            let id = DocId(*id);
                            for i in 1..=reach {
                                report.recomputed += 1;
                                if position(&tag, &id, i) == entry.position {
                                    report.matches.push(format!(
                                        "session {}: position recomputable from revealed tag and id at index {i}",
                                        env.session
                                    ));
                                }
                            }
                        }
                    }
                    for head in &heads {
                        report.recomputed += 1;
                        if tagged_hash(tags::LOC, head) == entry.chain.location {
                            report.matches.push(format!(
                                "session {}: chain location derived from a revealed head",
                                env.session
                            ));
                        }
                    }
                }
            }
            _ => {}
        }
    }

    report
}
