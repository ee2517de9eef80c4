//! Three-party protocol simulator: owner, cloud, and auditor exchanging
//! explicit messages over a transport, with a malicious-cloud strategy
//! menu, a plaintext referee, and transcript audits.

mod audit;
mod messages;
mod session;
mod transport;

pub use audit::{
    forward_privacy_audit, leakage_audit, FwdPrivacyReport, LeakageProfile, LeakageViolation,
};
pub use messages::{Body, Envelope, Party, ScriptOp, Transcript};
pub use session::{
    run_session, soundness_suite, AuditorRole, CloudRole, OwnerRole, SearchRecord, SessionReport,
    SimError, SoundnessReport, Strategy, StrategyOutcome,
};
pub use transport::{InProcess, TcpLoopback, Transport};
