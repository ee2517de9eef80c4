//! Deletions via twin structures: additions and deletions live in two
//! parallel signed structures, a verified search audits both, and the
//! result is the set difference.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use vsse::backend::{DocId, Keyword};
use vsse::signed::{twin_search, twin_update, ForwardVKeys, StructureKind, TwinCloud, TwinStates};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let keys = ForwardVKeys::generate(&mut rng);
    let w = Keyword::new("contracts").unwrap();

    let mut states = TwinStates::default();
    let mut cloud = TwinCloud::default();

    for byte in 1u8..=4 {
        twin_update(
            &keys,
            StructureKind::Add,
            &DocId([byte; 16]),
            &[w.clone()],
            &mut states,
            &mut cloud,
            &mut rng,
        )
        .unwrap();
    }
    println!("added 4 documents");

    twin_update(
        &keys,
        StructureKind::Del,
        &DocId([2; 16]),
        &[w.clone()],
        &mut states,
        &mut cloud,
        &mut rng,
    )
    .unwrap();
    println!("deleted document 02..");

    // Both structures are searched and audited; the verified result is
    // additions minus deletions.
    let verified = twin_search(&keys, &w, &states, &cloud).unwrap();
    let bytes: Vec<u8> = verified.ids.iter().map(|id| id.0[0]).collect();
    println!("verified result: documents {bytes:02x?}");
    assert_eq!(bytes, [1, 3, 4]);

    // The ledger keeps update streams well formed: re-adding a deleted
    // pair or deleting twice is refused before any token is issued.
    let err = twin_update(
        &keys,
        StructureKind::Add,
        &DocId([2; 16]),
        &[w.clone()],
        &mut states,
        &mut cloud,
        &mut rng,
    )
    .unwrap_err();
    println!("re-add of a deleted pair: {err}");
    let err = twin_update(
        &keys,
        StructureKind::Del,
        &DocId([2; 16]),
        &[w.clone()],
        &mut states,
        &mut cloud,
        &mut rng,
    )
    .unwrap_err();
    println!("double delete: {err}");

    // Tampering with the deletion half poisons the whole search even when
    // the addition half is honest.
    let mut broken = cloud.clone();
    broken.del = TwinCloud::default().del;
    let err = twin_search(&keys, &w, &states, &broken).unwrap_err();
    println!("tampered deletion structure: {err}");
}
