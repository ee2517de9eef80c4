//! Measure the cost shape of verified search: proof size and auditor work
//! stay flat while owner and cloud work grow with the result.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use vsse::bench;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let report = bench::run(&[1, 10, 100], 7, &mut rng);
    print!("{report}");

    assert!(report.proof_bytes_constant());
    println!("proof size is constant across result sizes");

    for row in &report.rows {
        assert_eq!(row.auditor_pairings, 2);
        assert_eq!(row.owner_mul_adds, row.result_size);
        assert_eq!(row.cloud_lookups, row.result_size);
        assert_eq!(row.cloud_group_muls, row.result_size - 1);
    }
    println!("auditor pays 2 pairings regardless of size");
    println!(
        "owner time grows {:.2} us per result row; auditor spread {:.2}x",
        report.owner_time_slope(),
        report.auditor_spread()
    );
}
