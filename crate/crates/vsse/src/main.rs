//! Command-line front end over the store: keygen, build, search, add,
//! del, bench, soundness.
//!
//! Exit codes: 0 success or verdict accept, 1 usage or input error,
//! 2 verdict reject or observed soundness failure, 3 store corruption.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::OsRng;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use vsse::backend::{DocId, Keyword, PlainDb, SseError};
use vsse::crypto::G1Elem;
use vsse::signed::{self, SearchProof, StructureKind, TwinCloud, TwinStates};
use vsse::sim::{soundness_suite, Strategy};
use vsse::store::{OwnerState, Store, StoreError};
use vsse::tagged;
use vsse::{bench, sim};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_REJECT: u8 = 2;
const EXIT_CORRUPT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "vsse",
    version,
    about = "Verifiable searchable encryption: build encrypted indexes, run verified searches, audit a malicious cloud"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Scheme {
    /// Build-time index with keyword-bound result tags; owner-verified.
    Static,
    /// Updatable twin structures with aggregated signatures; auditor-verified.
    Forward,
}

#[derive(Subcommand)]
enum Cmd {
    /// Create a store directory with fresh keys and empty structures
    Keygen {
        store: PathBuf,
        /// Overwrite the role files of an existing store
        #[arg(long)]
        force: bool,
    },
    /// Build both schemes' cloud structures from a corpus file
    /// (one record per line: keyword, tab, comma-separated 32-hex-char ids)
    Build { store: PathBuf, input: PathBuf },
    /// Run one verified search and print document names plus the verdict
    Search {
        store: PathBuf,
        keyword: String,
        /// Which scheme answers the search
        #[arg(long, value_enum, default_value_t = Scheme::Forward)]
        scheme: Scheme,
        /// Simulate a cheating cloud on this search (e.g. FLIP_ID_BIT)
        #[arg(long)]
        adversary: Option<String>,
    },
    /// Add one document id under the given keywords (dynamic scheme)
    Add {
        store: PathBuf,
        /// Document id, 32 hex chars
        id: String,
        #[arg(required = true)]
        keywords: Vec<String>,
    },
    /// Delete one document id from the given keywords (dynamic scheme)
    Del {
        store: PathBuf,
        /// Document id, 32 hex chars
        id: String,
        #[arg(required = true)]
        keywords: Vec<String>,
    },
    /// Measure per-role cost across result sizes and print the table
    Bench {
        /// Result sizes to measure
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_SIZES)]
        sizes: Vec<u64>,
        /// Wall-clock repetitions per size (minimum 5)
        #[arg(long, default_value_t = 7)]
        repetitions: u32,
        /// Emit the report as JSON instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Run randomized sessions for every cloud strategy and tally forgeries
    Soundness {
        /// Sessions per strategy
        #[arg(long, default_value_t = 20)]
        trials: u64,
        /// Seed for reproducible runs
        #[arg(long)]
        seed: Option<u64>,
        /// Emit the report as JSON instead of a table
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                EXIT_OK
            } else {
                EXIT_USAGE
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0}")]
    Usage(String),
    #[error("cloud structures are inconsistent: {0}")]
    CloudState(SseError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Store(e) if e.is_corruption() => EXIT_CORRUPT,
            CliError::Store(_) => EXIT_USAGE,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::CloudState(_) => EXIT_CORRUPT,
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.cmd {
        Cmd::Keygen { store, force } => keygen(store, force),
        Cmd::Build { store, input } => build(store, input),
        Cmd::Search { store, keyword, scheme, adversary } => {
            search(store, keyword, scheme, adversary)
        }
        Cmd::Add { store, id, keywords } => update(store, StructureKind::Add, id, keywords),
        Cmd::Del { store, id, keywords } => update(store, StructureKind::Del, id, keywords),
        Cmd::Bench { sizes, repetitions, json } => run_bench(sizes, repetitions, json),
        Cmd::Soundness { trials, seed, json } => run_soundness(trials, seed, json),
    }
}

fn parse_keyword(text: &str) -> Result<Keyword, CliError> {
    Keyword::new(text).map_err(|e| CliError::Usage(format!("keyword {text:?}: {e}")))
}

fn parse_id(text: &str) -> Result<DocId, CliError> {
    let bytes = hex::decode(text)
        .map_err(|_| CliError::Usage(format!("id {text:?}: expected 32 hex chars")))?;
    let bytes: [u8; 16] = bytes
        .try_into()
        .map_err(|_| CliError::Usage(format!("id {text:?}: expected 32 hex chars")))?;
    Ok(DocId(bytes))
}

fn keygen(root: PathBuf, force: bool) -> Result<u8, CliError> {
    let store = Store::keygen(&root, force, &mut OsRng)?;
    println!("created store at {}", store.layout().root().display());
    println!("owner keys, empty state, empty cloud structures, auditor public key written");
    Ok(EXIT_OK)
}

fn parse_corpus(text: &str) -> Result<PlainDb, CliError> {
    let mut db = PlainDb::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (kw_text, ids_text) = line.split_once('\t').ok_or_else(|| {
            CliError::Usage(format!("line {lineno}: expected keyword<TAB>id,id,..."))
        })?;
        let w = Keyword::new(kw_text)
            .map_err(|e| CliError::Usage(format!("line {lineno}: keyword: {e}")))?;
        let ids: Vec<&str> = ids_text.split(',').map(str::trim).collect();
        if ids.iter().all(|s| s.is_empty()) {
            return Err(CliError::Usage(format!("line {lineno}: record has no ids")));
        }
        for id_text in ids {
            let id = parse_id(id_text)
                .map_err(|_| CliError::Usage(format!("line {lineno}: id {id_text:?}: expected 32 hex chars")))?;
            db.insert(w.clone(), id).map_err(|e| match e {
                SseError::DuplicatePosting => CliError::Usage(format!(
                    "line {lineno}: duplicate pair ({kw_text}, {id_text})"
                )),
                other => CliError::Usage(format!("line {lineno}: {other}")),
            })?;
        }
    }
    Ok(db)
}

fn build(root: PathBuf, input: PathBuf) -> Result<u8, CliError> {
    let store = Store::open(&root)?;
    let _lock = store.lock()?;
    let text = std::fs::read_to_string(&input)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
    let db = parse_corpus(&text)?;
    let keys = store.load_keys()?;

    let (index, counts) = tagged::build(&keys.tagged, &db).map_err(CliError::CloudState)?;

    let mut twin_states = TwinStates::default();
    let mut twin = TwinCloud::default();
    for (w, ids) in db.iter() {
        for id in ids {
            signed::twin_update(
                &keys.forward,
                StructureKind::Add,
                id,
                std::slice::from_ref(w),
                &mut twin_states,
                &mut twin,
                &mut OsRng,
            )
            .map_err(|e| CliError::Usage(format!("build: {e}")))?;
        }
    }

    store.save_static_index(&index)?;
    store.save_twin(&twin)?;
    store.save_state(&OwnerState { counts, twin: twin_states })?;

    let pairs: usize = db.iter().map(|(_, ids)| ids.len()).sum();
    println!(
        "built {} keywords, {} pairs; signature table holds {} rows",
        db.keyword_count(),
        pairs,
        twin.add.tsig.len()
    );
    Ok(EXIT_OK)
}

fn parse_adversary(name: Option<String>) -> Result<Strategy, CliError> {
    match name {
        None => Ok(Strategy::Honest),
        Some(name) => name.parse().map_err(|e: String| {
            CliError::Usage(format!(
                "{e}; strategies: {}",
                Strategy::ALL.map(|s| s.name()).join(", ")
            ))
        }),
    }
}

fn print_verdict_and_names(ids: &[DocId]) -> u8 {
    for id in ids {
        println!("{}", hex::encode(id.name()));
    }
    println!("ACCEPT");
    EXIT_OK
}

fn reject(reason: &str) -> u8 {
    println!("REJECT {reason}");
    EXIT_REJECT
}

fn search(
    root: PathBuf,
    keyword: String,
    scheme: Scheme,
    adversary: Option<String>,
) -> Result<u8, CliError> {
    let strategy = parse_adversary(adversary)?;
    let store = Store::open(&root)?;
    let _lock = store.lock()?;
    let keys = store.load_keys()?;
    let state = store.load_state()?;
    let w = parse_keyword(&keyword)?;

    match scheme {
        Scheme::Static => {
            if matches!(strategy, Strategy::ForgeProof | Strategy::StaleIgnoreUpdate) {
                return Err(CliError::Usage(format!(
                    "{} does not apply to the static scheme (no proof element, no updates)",
                    strategy.name()
                )));
            }
            let index = store.load_static_index()?;
            let token = tagged::search_token(&keys.tagged, &w, &state.counts);
            let mut cells =
                tagged::cloud_answer(&index, &token).map_err(CliError::CloudState)?;
            match strategy {
                Strategy::Honest => {}
                Strategy::DropOne => {
                    if !cells.is_empty() {
                        cells.remove(0);
                    }
                }
                Strategy::ReplayOtherKeyword => {
                    if let Some(other) = state
                        .counts
                        .0
                        .keys()
                        .find(|&k| *k != w && state.counts.get(k) > 0)
                        .cloned()
                    {
                        let token = tagged::search_token(&keys.tagged, &other, &state.counts);
                        cells = tagged::cloud_answer(&index, &token)
                            .map_err(CliError::CloudState)?;
                    }
                }
                Strategy::FlipIdBit => {
                    if let Some(cell) = cells.first_mut() {
                        cell[0] ^= 0x01;
                    }
                }
                Strategy::ForgeProof | Strategy::StaleIgnoreUpdate => unreachable!(),
            }
            match tagged::verify(&keys.tagged, &w, state.counts.get(&w), &cells) {
                Ok(ids) => Ok(print_verdict_and_names(&ids)),
                Err(tagged::VerifyError::CountMismatch { .. }) => Ok(reject("count-mismatch")),
                Err(tagged::VerifyError::MalformedPosting) => Ok(reject("malformed-posting")),
                Err(tagged::VerifyError::TagMismatch) => Ok(reject("tag-mismatch")),
            }
        }
        Scheme::Forward => {
            let twin = store.load_twin()?;
            let pk = store.load_public_key()?;

            let mut halves = Vec::with_capacity(2);
            for kind in [StructureKind::Add, StructureKind::Del] {
                let request = signed::search_request(&keys.forward, kind, &w, state.twin.states(kind));
                let answer = match signed::cloud_search(twin.structure(kind), &request) {
                    Ok((result, proof, _)) => (result, proof),
                    Err(e) => {
                        if strategy == Strategy::Honest {
                            return Err(CliError::CloudState(e));
                        }
                        (Vec::new(), G1Elem::identity())
                    }
                };
                halves.push((request, answer));
            }

            match strategy {
                Strategy::Honest => {}
                Strategy::DropOne => {
                    let (request, (result, proof)) = &mut halves[0];
                    if !result.is_empty() {
                        result.pop();
                        *proof = result
                            .iter()
                            .filter_map(|(id, i)| {
                                twin.add.tsig.get(&signed::position(&request.tag, id, *i)).copied()
                            })
                            .fold(G1Elem::identity(), |acc, s| acc * s);
                    }
                }
                Strategy::ReplayOtherKeyword => {
                    if let Some(other) = state
                        .twin
                        .add
                        .0
                        .keys()
                        .find(|&k| *k != w && state.twin.add.count(k) > 0)
                        .cloned()
                    {
                        for (kind, slot) in [(StructureKind::Add, 0), (StructureKind::Del, 1)] {
                            let request = signed::search_request(
                                &keys.forward,
                                kind,
                                &other,
                                state.twin.states(kind),
                            );
                            if let Ok((result, proof, _)) =
                                signed::cloud_search(twin.structure(kind), &request)
                            {
                                halves[slot].1 = (result, proof);
                            }
                        }
                    }
                }
                Strategy::FlipIdBit => {
                    if let Some(pair) = halves[0].1 .0.first_mut() {
                        pair.0 .0[0] ^= 0x01;
                    }
                }
                Strategy::ForgeProof => {
                    let mut noise = [0u8; 32];
                    OsRng.fill_bytes(&mut noise);
                    halves[0].1 .1 =
                        G1Elem::generator().pow(vsse::crypto::hash_to_scalar(&noise));
                }
                Strategy::StaleIgnoreUpdate => {
                    // A cloud that never filed this keyword's entries can
                    // only answer empty.
                    for (_, answer) in halves.iter_mut() {
                        *answer = (Vec::new(), G1Elem::identity());
                    }
                }
            }

            let mut verified = Vec::with_capacity(2);
            for (kind, (_, (result, cloud_half))) in
                [StructureKind::Add, StructureKind::Del].into_iter().zip(&halves)
            {
                match signed::owner_proof(&keys.forward, kind, &w, result, state.twin.states(kind))
                {
                    Ok((owner_half, _)) => {
                        let proof = SearchProof { cloud_half: *cloud_half, owner_half };
                        let (ok, _) = signed::audit(&pk, &proof);
                        if !ok {
                            return Ok(reject("pairing-fail"));
                        }
                        verified.push(result.clone());
                    }
                    Err(_) => return Ok(reject("count-mismatch")),
                }
            }

            let deleted: std::collections::BTreeSet<DocId> =
                verified[1].iter().map(|(id, _)| *id).collect();
            let ids: Vec<DocId> = verified[0]
                .iter()
                .map(|(id, _)| *id)
                .filter(|id| !deleted.contains(id))
                .collect();
            Ok(print_verdict_and_names(&ids))
        }
    }
}

fn update(
    root: PathBuf,
    kind: StructureKind,
    id: String,
    keywords: Vec<String>,
) -> Result<u8, CliError> {
    let store = Store::open(&root)?;
    let _lock = store.lock()?;
    let keys = store.load_keys()?;
    let mut state = store.load_state()?;
    let mut twin = store.load_twin()?;

    let id = parse_id(&id)?;
    let kws = keywords.iter().map(|s| parse_keyword(s)).collect::<Result<Vec<_>, _>>()?;

    signed::twin_update(&keys.forward, kind, &id, &kws, &mut state.twin, &mut twin, &mut OsRng)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    store.save_twin(&twin)?;
    store.save_state(&state)?;
    let verb = match kind {
        StructureKind::Add => "added",
        StructureKind::Del => "deleted",
    };
    println!("{} document {} under {} keyword(s)", verb, hex::encode(id.name()), kws.len());
    Ok(EXIT_OK)
}

fn run_bench(sizes: Vec<u64>, repetitions: u32, json: bool) -> Result<u8, CliError> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CliError::Usage("sizes must be positive".into()));
    }
    let report = bench::run(&sizes, repetitions, &mut OsRng);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{report}");
    }
    Ok(EXIT_OK)
}

fn run_soundness(trials: u64, seed: Option<u64>, json: bool) -> Result<u8, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("trials must be positive".into()));
    }
    let mut rng = match seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_rng(OsRng).expect("os entropy"),
    };
    let report = soundness_suite(trials, &mut rng)
        .map_err(|e: sim::SimError| CliError::Usage(e.to_string()))?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{report}");
    }
    let clean = report.outcomes.iter().all(|(strategy, o)| {
        o.accepted_forgeries == 0
            && (*strategy != Strategy::Honest || o.accepts == o.searches)
    });
    if clean {
        if !json {
            println!("no accepted forgeries in {trials} sessions per strategy");
        }
        Ok(EXIT_OK)
    } else {
        if !json {
            println!("SOUNDNESS FAILURE OBSERVED");
        }
        Ok(EXIT_REJECT)
    }
}
