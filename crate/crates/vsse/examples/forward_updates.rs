//! Dynamic scheme: build a signed structure, add documents after the
//! fact, and verify searches with the two-pairing audit equation.
//!
//! Every (keyword, document) pair deposits one BLS signature in a
//! cloud-held table. A search returns the pairs plus the product of their
//! signatures; the owner folds the matching blinded messages; the auditor
//! checks one pairing equation. Update messages are keyed by values the
//! cloud has never seen, so they are unlinkable to past searches.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use vsse::backend::{DocId, Keyword, PlainDb};
use vsse::crypto::{pairing, G1Elem, G2Elem};
use vsse::signed::{self, ForwardVKeys, SearchProof, StructureKind};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let keys = ForwardVKeys::generate(&mut rng);
    let w = Keyword::new("inbox").unwrap();

    let mut db = PlainDb::new();
    db.insert(w.clone(), DocId([0xa1; 16])).unwrap();
    db.insert(w.clone(), DocId([0xa2; 16])).unwrap();
    let (mut structure, mut states) = signed::build(&keys, &db, &mut rng).unwrap();
    println!("built: {} signature rows", structure.tsig.len());

    // Search: cloud walks the chain and aggregates signatures.
    let request = signed::search_request(&keys, StructureKind::Add, &w, &states);
    let (result, cloud_half, cloud_cost) = signed::cloud_search(&structure, &request).unwrap();
    let (owner_half, owner_cost) =
        signed::owner_proof(&keys, StructureKind::Add, &w, &result, &states).unwrap();
    let proof = SearchProof { cloud_half, owner_half };
    let (ok, audit_cost) = signed::audit(&keys.public_key(), &proof);
    println!(
        "search: {} results, cloud {} lookups + {} muls, owner {} mul-adds, auditor {} pairings, accept = {ok}",
        result.len(),
        cloud_cost.lookups,
        cloud_cost.group_muls,
        owner_cost.mul_adds,
        audit_cost.pairings
    );

    // The audit is exactly e(pf_c, g2) == e(g1^pf_o, pk).
    let lhs = pairing(&proof.cloud_half, &G2Elem::generator());
    let rhs = pairing(&G1Elem::generator().pow(proof.owner_half), &keys.public_key());
    assert_eq!(lhs, rhs);
    println!("pairing equation holds; proof is {} bytes", proof.to_bytes().len());

    // Add two documents after the build. The tokens carry fresh random
    // chain states and positions derived from a per-keyword key the cloud
    // only learns at the next search.
    for (i, byte) in [(3u8, 0xa3u8), (4, 0xa4)] {
        let id = DocId([byte; 16]);
        let token =
            signed::update_token(&keys, StructureKind::Add, &id, &[w.clone()], &mut states, &mut rng)
                .unwrap();
        signed::apply_update(&mut structure, &token).unwrap();
        println!("update {i}: +1 chain entry, +1 signature row");
    }

    // The next search covers old and new pairs under one 80-byte proof.
    let request = signed::search_request(&keys, StructureKind::Add, &w, &states);
    let (result, cloud_half, _) = signed::cloud_search(&structure, &request).unwrap();
    let (owner_half, _) =
        signed::owner_proof(&keys, StructureKind::Add, &w, &result, &states).unwrap();
    let (ok, _) = signed::audit(&keys.public_key(), &SearchProof { cloud_half, owner_half });
    println!("after updates: {} results, accept = {ok}", result.len());
    assert!(ok);
    assert_eq!(result.len(), 4);

    // A stale cloud that ignored the updates cannot even walk the chain:
    // the search token starts at a head it never stored.
    let (stale, _) = signed::build(&keys, &db, &mut ChaCha20Rng::seed_from_u64(7)).unwrap();
    let err = signed::cloud_search(&stale, &request).unwrap_err();
    println!("stale cloud: {err}");
}
