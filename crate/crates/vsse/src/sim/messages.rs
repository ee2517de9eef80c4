//! The wire vocabulary of the three-party protocol.
//!
//! A transcript is the ordered list of every envelope that crossed the
//! transport. Envelopes serialize to one JSON object per line; the leakage
//! audit works on exactly that representation, so whatever a field holds
//! here is what the receiving party is considered to have observed.

use serde::{Deserialize, Serialize};

use crate::backend::{DocId, Keyword};
use crate::crypto::{G1Elem, Scalar};
use crate::signed::{CloudStructure, FwdUpdateToken, RejectReason, SearchRequest};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Party {
    Owner,
    Cloud,
    Auditor,
}

/// One protocol message. `session` ties the messages of one query together
/// and increases monotonically across a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub from: Party,
    pub to: Party,
    pub session: u64,
    pub body: Body,
}

/// Message payloads. Search bodies carry both twin structures' halves: a
/// verified search always runs the addition and deletion structures side
/// by side, and the verdict covers the pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Body {
    /// Owner hands the cloud its initial structures.
    BuildUpload {
        add: CloudStructure,
        del: CloudStructure,
    },
    /// Owner opens a search: one request per twin structure.
    SearchRequest {
        add: SearchRequest,
        del: SearchRequest,
    },
    /// Cloud returns the recovered (id, position) pairs.
    SearchResult {
        add: Vec<(DocId, u64)>,
        del: Vec<(DocId, u64)>,
    },
    /// Cloud's aggregated proof halves go to the auditor.
    ProofCloud { add: G1Elem, del: G1Elem },
    /// Owner's folded scalars. A missing half tells the auditor the owner
    /// already rejected that structure's result by count or layout.
    ProofOwner {
        add: Option<Scalar>,
        del: Option<Scalar>,
    },
    /// Auditor's single-bit answer, with the reason when it is a reject.
    Verdict {
        accept: bool,
        reason: Option<RejectReason>,
    },
    /// Owner ships one document update: the token plus the public name the
    /// encrypted document is stored under.
    UpdateUpload {
        doc: String,
        token: FwdUpdateToken,
    },
}

impl Body {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Body::BuildUpload { .. } => "BuildUpload",
            Body::SearchRequest { .. } => "SearchRequest",
            Body::SearchResult { .. } => "SearchResult",
            Body::ProofCloud { .. } => "ProofCloud",
            Body::ProofOwner { .. } => "ProofOwner",
            Body::Verdict { .. } => "Verdict",
            Body::UpdateUpload { .. } => "UpdateUpload",
        }
    }
}

/// Everything that crossed the transport, in order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub entries: Vec<Envelope>,
}

impl Transcript {
    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for env in &self.entries {
            out.push_str(&serde_json::to_string(env).expect("envelopes serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, serde_json::Error> {
        let mut entries = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            entries.push(serde_json::from_str(line)?);
        }
        Ok(Transcript { entries })
    }
}

/// One scripted operation against the running system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScriptOp {
    Search(Keyword),
    Add { id: DocId, kws: Vec<Keyword> },
    Del { id: DocId, kws: Vec<Keyword> },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcript_jsonl_round_trips() {
        let transcript = Transcript {
            entries: vec![
                Envelope {
                    from: Party::Auditor,
                    to: Party::Owner,
                    session: 3,
                    body: Body::Verdict { accept: false, reason: Some(RejectReason::PairingFail) },
                },
                Envelope {
                    from: Party::Cloud,
                    to: Party::Owner,
                    session: 4,
                    body: Body::SearchResult {
                        add: vec![(DocId([1u8; 16]), 1)],
                        del: vec![],
                    },
                },
            ],
        };
        let text = transcript.to_jsonl();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(Transcript::from_jsonl(&text).unwrap(), transcript);
    }

    #[test]
    fn envelope_json_carries_a_kind_discriminant() {
        let env = Envelope {
            from: Party::Owner,
            to: Party::Cloud,
            session: 0,
            body: Body::UpdateUpload {
                doc: "aa".into(),
                token: crate::signed::FwdUpdateToken {
                    kind: crate::signed::StructureKind::Add,
                    entries: vec![],
                },
            },
        };
        let json: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&env).unwrap()).unwrap();
        assert_eq!(json["body"]["kind"], "UpdateUpload");
        assert_eq!(json["from"], "Owner");
    }
}
