//! End-to-end tests of the installed binary: every verb, every exit code.
//!
//! Exit code contract: 0 success or accept, 1 usage or input error,
//! 2 verdict reject, 3 store corruption.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use vsse::crypto::doc_name;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsse"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[track_caller]
fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "wrong exit code\nstdout: {}\nstderr: {}",
        stdout(out),
        stderr(out)
    );
}

fn id_bytes(tail: u8) -> [u8; 16] {
    let mut id = [0u8; 16];
    id[15] = tail;
    id
}

fn id_hex(tail: u8) -> String {
    hex::encode(id_bytes(tail))
}

fn name_hex(tail: u8) -> String {
    hex::encode(doc_name(&id_bytes(tail)))
}

/// Store with three keywords built from a corpus file. Returns the store
/// path as a string.
fn built_store(dir: &Path) -> String {
    let store = dir.join("store");
    let store_s = store.to_str().expect("utf8 path").to_owned();
    assert_code(&run(&["keygen", &store_s]), 0);
    let corpus = dir.join("corpus.tsv");
    fs::write(
        &corpus,
        format!(
            "apple\t{},{},{}\npear\t{}\nplum\t{},{}\n",
            id_hex(1),
            id_hex(2),
            id_hex(3),
            id_hex(2),
            id_hex(0xaa),
            id_hex(0xbb)
        ),
    )
    .expect("corpus written");
    let out = run(&["build", &store_s, corpus.to_str().expect("utf8 path")]);
    assert_code(&out, 0);
    assert!(
        stdout(&out).contains("built 3 keywords, 6 pairs"),
        "unexpected build summary: {}",
        stdout(&out)
    );
    store_s
}

#[test]
fn keygen_creates_the_skeleton_and_refuses_to_overwrite() {
    let dir = tempfile::tempdir().expect("tempdir");
    let store = dir.path().join("store");
    let store_s = store.to_str().expect("utf8 path");

    let out = run(&["keygen", store_s]);
    assert_code(&out, 0);
    assert!(stdout(&out).contains("created store"));
    for sub in ["owner", "cloud", "auditor"] {
        assert!(store.join(sub).is_dir(), "missing role directory {sub}");
    }

    assert_code(&run(&["keygen", store_s]), 1);
    assert_code(&run(&["keygen", store_s, "--force"]), 0);
}

#[test]
fn honest_searches_accept_and_match_the_corpus() {
    let dir = tempfile::tempdir().expect("tempdir");
    let store = built_store(dir.path());

    for scheme in ["forward", "static"] {
        let out = run(&["search", &store, "apple", "--scheme", scheme]);
        assert_code(&out, 0);
        let text = stdout(&out);
        assert_eq!(
            text.lines().collect::<Vec<_>>(),
            vec![name_hex(1).as_str(), name_hex(2).as_str(), name_hex(3).as_str(), "ACCEPT"],
            "{scheme} search printed the wrong names"
        );
    }

    // A keyword that was never indexed: empty result, still verified.
    let out = run(&["search", &store, "quince"]);
    assert_code(&out, 0);
    assert_eq!(stdout(&out).lines().collect::<Vec<_>>(), vec!["ACCEPT"]);
}

#[test]
fn adversarial_searches_reject_with_exit_2() {
    let dir = tempfile::tempdir().expect("tempdir");
    let store = built_store(dir.path());

    for adversary in
        ["DROP_ONE", "REPLAY_OTHER_KEYWORD", "FLIP_ID_BIT", "FORGE_PROOF", "STALE_IGNORE_UPDATE"]
    {
        let out = run(&["search", &store, "apple", "--adversary", adversary]);
        assert_code(&out, 2);
        let text = stdout(&out);
        assert!(
            text.lines().count() == 1 && text.starts_with("REJECT"),
            "{adversary}: rejection must print only the REJECT line, got: {text}"
        );
    }

    for adversary in ["DROP_ONE", "REPLAY_OTHER_KEYWORD", "FLIP_ID_BIT"] {
        let out = run(&["search", &store, "apple", "--scheme", "static", "--adversary", adversary]);
        assert_code(&out, 2);
        assert!(stdout(&out).starts_with("REJECT"));
    }

    // Strategy names are case-insensitive.
    assert_code(&run(&["search", &store, "apple", "--adversary", "flip_id_bit"]), 2);

    // No proof forgery or update staleness exists in the static scheme.
    assert_code(&run(&["search", &store, "apple", "--scheme", "static", "--adversary", "FORGE_PROOF"]), 1);
    // Unknown strategy name.
    assert_code(&run(&["search", &store, "apple", "--adversary", "EAT_THE_INDEX"]), 1);
}

#[test]
fn add_and_del_change_later_searches() {
    let dir = tempfile::tempdir().expect("tempdir");
    let store = built_store(dir.path());
    let new_id = id_hex(0xcc);
    let new_name = name_hex(0xcc);

    let out = run(&["add", &store, &new_id, "apple"]);
    assert_code(&out, 0);
    assert!(stdout(&out).contains(&format!("added document {new_name} under 1 keyword(s)")));

    let out = run(&["search", &store, "apple"]);
    assert_code(&out, 0);
    assert!(stdout(&out).contains(&new_name));

    let out = run(&["del", &store, &new_id, "apple"]);
    assert_code(&out, 0);
    assert!(stdout(&out).contains(&format!("deleted document {new_name}")));

    let out = run(&["search", &store, "apple"]);
    assert_code(&out, 0);
    assert!(!stdout(&out).contains(&new_name), "deleted document still returned");
    assert!(stdout(&out).ends_with("ACCEPT\n"));

    // The pair ledger: no double delete, no re-add of a deleted pair, no
    // duplicate add of a live pair.
    assert_code(&run(&["del", &store, &new_id, "apple"]), 1);
    assert_code(&run(&["add", &store, &new_id, "apple"]), 1);
    assert_code(&run(&["add", &store, &id_hex(1), "apple"]), 1);

    // Ids must be exactly 32 hex chars.
    assert_code(&run(&["add", &store, "abc123", "apple"]), 1);
    assert_code(&run(&["add", &store, &format!("{}zz", &new_id[..30]), "apple"]), 1);
}

#[test]
fn malformed_corpus_lines_name_the_line() {
    let dir = tempfile::tempdir().expect("tempdir");
    let store = dir.path().join("store");
    let store_s = store.to_str().expect("utf8 path");
    assert_code(&run(&["keygen", store_s]), 0);

    let bad_id_line = format!("apple\t{},xyz", id_hex(1));
    let dup_pair_line = format!("apple\t{},{}", id_hex(1), id_hex(1));
    let cases = [
        ("apple no-tab-here", "missing tab"),
        (bad_id_line.as_str(), "bad id"),
        (dup_pair_line.as_str(), "duplicate pair"),
    ];
    for (line, what) in cases {
        let corpus = dir.path().join("bad.tsv");
        fs::write(&corpus, format!("{line}\n")).expect("corpus written");
        let out = run(&["build", store_s, corpus.to_str().expect("utf8 path")]);
        assert_code(&out, 1);
        assert!(
            stderr(&out).contains("line 1"),
            "{what}: error must cite the line, got: {}",
            stderr(&out)
        );
    }
}

#[test]
fn missing_store_locked_store_and_corruption_codes() {
    let dir = tempfile::tempdir().expect("tempdir");

    // No store at all: input error, not corruption.
    let ghost = dir.path().join("nowhere");
    assert_code(&run(&["search", ghost.to_str().expect("utf8 path"), "apple"]), 1);

    let store = built_store(dir.path());

    // A concurrent invocation holds the lock.
    let lock = Path::new(&store).join(".lock");
    fs::write(&lock, b"").expect("lock created");
    assert_code(&run(&["search", &store, "apple"]), 1);
    fs::remove_file(&lock).expect("lock removed");
    assert_code(&run(&["search", &store, "apple"]), 0);

    // Mangled key file: corruption, exit 3.
    let keys_file = Path::new(&store).join("owner").join("keys.bin");
    let original = fs::read(&keys_file).expect("keys readable");
    fs::write(&keys_file, b"ZZZZ\x01not a key file").expect("keys mangled");
    assert_code(&run(&["search", &store, "apple"]), 3);

    // Future version byte: also corruption.
    let mut versioned = original.clone();
    versioned[4] = 9;
    fs::write(&keys_file, &versioned).expect("keys rewritten");
    assert_code(&run(&["search", &store, "apple"]), 3);

    fs::write(&keys_file, &original).expect("keys restored");
    assert_code(&run(&["search", &store, "apple"]), 0);
}

#[test]
fn bench_and_soundness_smoke() {
    let out = run(&["bench", "--sizes", "1,2", "--repetitions", "5", "--json"]);
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("bench JSON");
    assert_eq!(report["rows"].as_array().expect("rows array").len(), 2);
    assert_eq!(report["rows"][0]["auditor_pairings"], 2);

    // Size zero is meaningless and must be refused.
    assert_code(&run(&["bench", "--sizes", "0,2", "--repetitions", "5"]), 1);

    let out = run(&["soundness", "--trials", "1", "--seed", "7"]);
    assert_code(&out, 0);
    assert!(stdout(&out).contains("no accepted forgeries in 1 sessions per strategy"));

    let out = run(&["soundness", "--trials", "1", "--seed", "7", "--json"]);
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("soundness JSON");
    assert_eq!(report["outcomes"].as_object().expect("outcomes map").len(), 6);
}

#[test]
fn help_and_version_exit_clean() {
    assert_code(&run(&["--help"]), 0);
    assert_code(&run(&["--version"]), 0);
    // An unknown verb is a usage error.
    assert_code(&run(&["frobnicate"]), 1);
    // So is a missing required argument.
    assert_code(&run(&["search"]), 1);
}
