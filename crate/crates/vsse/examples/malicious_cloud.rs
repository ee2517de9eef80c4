//! The soundness game: run scripted sessions where the cloud cheats in
//! every way the threat model names, and show that no wrong result is
//! ever accepted.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use vsse::sim::{soundness_suite, Strategy};

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(31337);
    let trials = 10;
    let report = soundness_suite(trials, &mut rng).unwrap();
    print!("{report}");

    for (strategy, outcome) in &report.outcomes {
        assert_eq!(outcome.accepted_forgeries, 0, "{strategy} forged an accept");
        match strategy {
            Strategy::Honest => {
                assert_eq!(outcome.accepts, outcome.searches);
                println!("{strategy}: every honest search accepted");
            }
            _ => {
                assert!(outcome.tampered_searches > 0);
                println!(
                    "{strategy}: {} tampered answers, all rejected",
                    outcome.tampered_searches
                );
            }
        }
    }
}
