//! Verifiable searchable symmetric encryption.
//!
//! Two generic transforms make an embedded SSE scheme verifiable against a
//! malicious storage server:
//!
//! * [`tagged`]: a static index where every keyword's posting list carries a
//!   keyword-bound MAC tag. Only the key holder can check a result, so
//!   verification is private to the owner.
//! * [`signed`]: a forward-private dynamic index paired with a cloud-held
//!   signature table. Search proofs aggregate to one group element and one
//!   scalar, and any holder of the public key (an auditor) can check them
//!   with two pairings, learning nothing about the result contents.
//!
//! [`backend`] supplies the embedded schemes the transforms wrap: an
//! encrypted inverted index for static data and a hash-chain scheme for
//! dynamic data whose update tokens are unlinkable to past searches.
//! [`sim`] drives owner, cloud, and auditor as message-passing state machines
//! with pluggable malicious-cloud strategies, and [`store`] persists every
//! role's files on disk for the `vsse` command-line tool.
//!
//! The runnable programs under `examples/` walk through each capability.

pub mod backend;
pub mod bench;
pub mod crypto;
pub mod signed;
pub mod sim;
pub mod store;
pub mod tagged;
