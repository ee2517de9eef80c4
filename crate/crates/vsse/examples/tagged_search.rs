//! Static scheme end to end: build an encrypted index whose keywords each
//! carry a hidden result tag, search it, and watch tampered answers fail.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use vsse::backend::{DocId, Keyword, PlainDb};
use vsse::tagged::{self, StaticVKeys};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    let keys = StaticVKeys::generate(&mut rng);

    let mut db = PlainDb::new();
    let alpha = Keyword::new("alpha").unwrap();
    let beta = Keyword::new("beta").unwrap();
    db.insert(alpha.clone(), DocId([1; 16])).unwrap();
    db.insert(alpha.clone(), DocId([2; 16])).unwrap();
    db.insert(beta.clone(), DocId([1; 16])).unwrap();

    // The index stores one extra cell per keyword: a MAC over the posting
    // list, encrypted like any other posting. The cloud cannot tell tags
    // from ids.
    let (index, counts) = tagged::build(&keys, &db).unwrap();
    println!("index cells: {} (3 postings + 2 tags)", index.len());

    let ids = tagged::search(&keys, &alpha, &index, &counts).unwrap();
    println!("alpha -> {} documents, tag verified", ids.len());
    assert_eq!(ids, db.postings(&alpha));

    // A cheating cloud drops a posting: the count no longer matches.
    let token = tagged::search_token(&keys, &alpha, &counts);
    let mut cells = tagged::cloud_answer(&index, &token).unwrap();
    cells.remove(0);
    let err = tagged::verify(&keys, &alpha, counts.get(&alpha), &cells).unwrap_err();
    println!("dropped posting -> {err}");

    // It substitutes beta's answer for alpha's: the tag is bound to the
    // keyword, so the replay fails even though every cell is genuine.
    let beta_token = tagged::search_token(&keys, &beta, &counts);
    let beta_cells = tagged::cloud_answer(&index, &beta_token).unwrap();
    let err = tagged::verify(&keys, &alpha, counts.get(&beta), &beta_cells).unwrap_err();
    println!("replayed other keyword -> {err}");

    // It flips one bit in one id: the recomputed tag disagrees.
    let mut cells = tagged::cloud_answer(&index, &token).unwrap();
    cells[0][0] ^= 1;
    let err = tagged::verify(&keys, &alpha, counts.get(&alpha), &cells).unwrap_err();
    println!("flipped id bit -> {err}");
}
