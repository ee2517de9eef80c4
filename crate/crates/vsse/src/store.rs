//! On-disk store: one subtree per role, binary files carrying a magic and
//! a version byte, and a lock file against concurrent invocations.
//!
//! The layout mirrors who is allowed to hold what. The owner subtree has
//! the keys and the counters; the cloud subtree has only encrypted indexes
//! and signature tables, nothing key-shaped; the auditor subtree is a
//! single public key. A process pointed at one subtree learns exactly what
//! that role would.
//!
//! Files are written atomically (temp file, then rename), and every load
//! distinguishes "missing" from "corrupt": a missing file is an operator
//! error, a bad magic, version, or payload is store corruption and gets
//! its own exit code at the CLI.

use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use rand::{CryptoRng, RngCore};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::backend::EncryptedIndex;
use crate::crypto::G2Elem;
use crate::signed::{CloudStructure, ForwardVKeys, SignatureTable, StructureKind, TwinCloud, TwinStates};
use crate::tagged::{KeywordCounts, StaticVKeys};

pub const STORE_VERSION: u8 = 1;

/// Per-file magics. Four bytes each; the version byte follows.
mod magic {
    pub const KEYS: &[u8; 4] = b"VSKY";
    pub const STATE: &[u8; 4] = b"VSST";
    pub const INDEX: &[u8; 4] = b"VSIX";
    pub const SIGS: &[u8; 4] = b"VSSG";
    pub const PUBKEY: &[u8; 4] = b"VSPK";
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} already exists and is not empty")]
    AlreadyExists(PathBuf),
    #[error("{0} is missing")]
    Missing(PathBuf),
    #[error("{0} is locked by another invocation")]
    Locked(PathBuf),
    #[error("{path}: bad magic {found:02x?}")]
    BadMagic { path: PathBuf, found: Vec<u8> },
    #[error("{path}: unsupported version {found}")]
    BadVersion { path: PathBuf, found: u8 },
    #[error("{path}: corrupt payload: {detail}")]
    Corrupt { path: PathBuf, detail: String },
}

impl StoreError {
    /// True for damage to file contents, as opposed to operator errors
    /// like a missing store or a held lock. The CLI exits 3 on these.
    pub fn is_corruption(&self) -> bool {
        matches!(
            self,
            StoreError::BadMagic { .. } | StoreError::BadVersion { .. } | StoreError::Corrupt { .. }
        )
    }
}

fn io_err(path: &Path, source: std::io::Error) -> StoreError {
    StoreError::Io { path: path.to_path_buf(), source }
}

/// Where every file of a store lives.
#[derive(Clone, Debug)]
pub struct StoreLayout {
    root: PathBuf,
}

impl StoreLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        StoreLayout { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn owner_dir(&self) -> PathBuf {
        self.root.join("owner")
    }

    pub fn cloud_dir(&self) -> PathBuf {
        self.root.join("cloud")
    }

    pub fn auditor_dir(&self) -> PathBuf {
        self.root.join("auditor")
    }

    pub fn keys_file(&self) -> PathBuf {
        self.owner_dir().join("keys.bin")
    }

    pub fn state_file(&self) -> PathBuf {
        self.owner_dir().join("state.bin")
    }

    pub fn static_index_file(&self) -> PathBuf {
        self.cloud_dir().join("static.idx")
    }

    pub fn structure_index_file(&self, kind: StructureKind) -> PathBuf {
        match kind {
            StructureKind::Add => self.cloud_dir().join("add.idx"),
            StructureKind::Del => self.cloud_dir().join("del.idx"),
        }
    }

    pub fn signature_file(&self, kind: StructureKind) -> PathBuf {
        match kind {
            StructureKind::Add => self.cloud_dir().join("add.sig"),
            StructureKind::Del => self.cloud_dir().join("del.sig"),
        }
    }

    pub fn public_key_file(&self) -> PathBuf {
        self.auditor_dir().join("pk.bin")
    }

    pub fn lock_file(&self) -> PathBuf {
        self.root.join(".lock")
    }
}

/// Held while a CLI invocation works on the store; the file disappears
/// when the guard drops.
#[derive(Debug)]
pub struct LockGuard {
    path: PathBuf,
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Everything the owner keeps secret: static-scheme keys and the
/// signature-scheme key set.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct OwnerKeys {
    pub tagged: StaticVKeys,
    pub forward: ForwardVKeys,
}

impl OwnerKeys {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        OwnerKeys { tagged: StaticVKeys::generate(rng), forward: ForwardVKeys::generate(rng) }
    }
}

/// Owner-side mutable state: static posting counts plus the twin chain
/// states and pair ledger.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OwnerState {
    pub counts: KeywordCounts,
    pub twin: TwinStates,
}

fn write_file<T: Serialize>(path: &Path, magic: &[u8; 4], value: &T) -> Result<(), StoreError> {
    let mut bytes = Vec::with_capacity(64);
    bytes.extend_from_slice(magic);
    bytes.push(STORE_VERSION);
    bincode::serialize_into(&mut bytes, value)
        .map_err(|e| StoreError::Corrupt { path: path.to_path_buf(), detail: e.to_string() })?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, &bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))?;
    Ok(())
}

fn read_file<T: DeserializeOwned>(path: &Path, magic: &[u8; 4]) -> Result<T, StoreError> {
    let bytes = match fs::read(path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == ErrorKind::NotFound => {
            return Err(StoreError::Missing(path.to_path_buf()))
        }
        Err(e) => return Err(io_err(path, e)),
    };
    if bytes.len() < 5 || &bytes[..4] != magic {
        return Err(StoreError::BadMagic {
            path: path.to_path_buf(),
            found: bytes.get(..4).unwrap_or(&bytes).to_vec(),
        });
    }
    if bytes[4] != STORE_VERSION {
        return Err(StoreError::BadVersion { path: path.to_path_buf(), found: bytes[4] });
    }
    bincode::deserialize(&bytes[5..])
        .map_err(|e| StoreError::Corrupt { path: path.to_path_buf(), detail: e.to_string() })
}

/// A store rooted at one directory. All accessors read or write whole
/// files; callers hold the lock across a load-modify-save sequence.
#[derive(Debug)]
pub struct Store {
    layout: StoreLayout,
}

impl Store {
    /// Creates a fresh store: role subtrees, new keys, empty state and
    /// cloud files, and the auditor's copy of the public key. Refuses a
    /// non-empty directory unless `force` is set, in which case the role
    /// files are rewritten in place.
    pub fn keygen<R: RngCore + CryptoRng>(
        root: impl Into<PathBuf>,
        force: bool,
        rng: &mut R,
    ) -> Result<Store, StoreError> {
        let layout = StoreLayout::new(root);
        let root = layout.root();
        match fs::read_dir(root) {
            Ok(mut entries) => {
                if entries.next().is_some() && !force {
                    return Err(StoreError::AlreadyExists(root.to_path_buf()));
                }
            }
            Err(e) if e.kind() == ErrorKind::NotFound => {}
            Err(e) => return Err(io_err(root, e)),
        }
        for dir in [layout.owner_dir(), layout.cloud_dir(), layout.auditor_dir()] {
            fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        }

        let keys = OwnerKeys::generate(rng);
        let store = Store { layout };
        store.save_keys(&keys)?;
        store.save_state(&OwnerState::default())?;
        store.save_static_index(&EncryptedIndex::default())?;
        for kind in [StructureKind::Add, StructureKind::Del] {
            store.save_structure(kind, &CloudStructure::default())?;
        }
        store.save_public_key(&keys.forward.public_key())?;
        Ok(store)
    }

    /// Opens an existing store. Only the directory skeleton is checked
    /// here; individual files are validated when read.
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let layout = StoreLayout::new(root);
        for dir in [layout.owner_dir(), layout.cloud_dir(), layout.auditor_dir()] {
            if !dir.is_dir() {
                return Err(StoreError::Missing(dir));
            }
        }
        Ok(Store { layout })
    }

    pub fn layout(&self) -> &StoreLayout {
        &self.layout
    }

    pub fn lock(&self) -> Result<LockGuard, StoreError> {
        let path = self.layout.lock_file();
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(LockGuard { path }),
            Err(e) if e.kind() == ErrorKind::AlreadyExists => Err(StoreError::Locked(path)),
            Err(e) => Err(io_err(&path, e)),
        }
    }

    pub fn save_keys(&self, keys: &OwnerKeys) -> Result<(), StoreError> {
        write_file(&self.layout.keys_file(), magic::KEYS, keys)
    }

    pub fn load_keys(&self) -> Result<OwnerKeys, StoreError> {
        read_file(&self.layout.keys_file(), magic::KEYS)
    }

    pub fn save_state(&self, state: &OwnerState) -> Result<(), StoreError> {
        write_file(&self.layout.state_file(), magic::STATE, state)
    }

    pub fn load_state(&self) -> Result<OwnerState, StoreError> {
        read_file(&self.layout.state_file(), magic::STATE)
    }

    pub fn save_static_index(&self, index: &EncryptedIndex) -> Result<(), StoreError> {
        write_file(&self.layout.static_index_file(), magic::INDEX, index)
    }

    pub fn load_static_index(&self) -> Result<EncryptedIndex, StoreError> {
        read_file(&self.layout.static_index_file(), magic::INDEX)
    }

    pub fn save_structure(
        &self,
        kind: StructureKind,
        structure: &CloudStructure,
    ) -> Result<(), StoreError> {
        write_file(&self.layout.structure_index_file(kind), magic::INDEX, &structure.index)?;
        write_file(&self.layout.signature_file(kind), magic::SIGS, &structure.tsig)
    }

    pub fn load_structure(&self, kind: StructureKind) -> Result<CloudStructure, StoreError> {
        let index: EncryptedIndex = read_file(&self.layout.structure_index_file(kind), magic::INDEX)?;
        let tsig: SignatureTable = read_file(&self.layout.signature_file(kind), magic::SIGS)?;
        Ok(CloudStructure { index, tsig })
    }

    pub fn load_twin(&self) -> Result<TwinCloud, StoreError> {
        Ok(TwinCloud {
            add: self.load_structure(StructureKind::Add)?,
            del: self.load_structure(StructureKind::Del)?,
        })
    }

    pub fn save_twin(&self, twin: &TwinCloud) -> Result<(), StoreError> {
        self.save_structure(StructureKind::Add, &twin.add)?;
        self.save_structure(StructureKind::Del, &twin.del)
    }

    pub fn save_public_key(&self, pk: &G2Elem) -> Result<(), StoreError> {
        write_file(&self.layout.public_key_file(), magic::PUBKEY, pk)
    }

    pub fn load_public_key(&self) -> Result<G2Elem, StoreError> {
        read_file(&self.layout.public_key_file(), magic::PUBKEY)
    }
}
