//! Provenance manifests for output directories.
//!
//! A manifest records the producing stage, tool version, seed, input
//! digests and the digest of the effective config. It deliberately carries
//! no timestamps: rerunning a stage with identical inputs must produce a
//! byte-identical manifest.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MANIFEST_FILE: &str = "provenance.json";
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ProvenanceError {
    #[error("i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest parse on {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("serialization: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn hash_file(path: impl AsRef<Path>) -> Result<String, ProvenanceError> {
    let path = path.as_ref();
    let io_err = |source| ProvenanceError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::File::open(path).map_err(io_err)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(io_err)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub schema_version: u32,
    /// Pipeline stage that produced the directory, e.g. "train".
    pub stage: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    /// Input label to sha256 digest.
    pub inputs: BTreeMap<String, String>,
    /// Digest of the effective config serialized as JSON.
    pub config_digest: String,
}

impl Provenance {
    pub fn new(stage: impl Into<String>) -> Self {
        Provenance {
            schema_version: MANIFEST_SCHEMA_VERSION,
            stage: stage.into(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            inputs: BTreeMap::new(),
            config_digest: String::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_input_digest(mut self, label: impl Into<String>, digest: impl Into<String>) -> Self {
        self.inputs.insert(label.into(), digest.into());
        self
    }

    pub fn with_input_file(
        mut self,
        label: impl Into<String>,
        path: impl AsRef<Path>,
    ) -> Result<Self, ProvenanceError> {
        let digest = hash_file(path)?;
        self.inputs.insert(label.into(), digest);
        Ok(self)
    }

    pub fn with_config<C: Serialize>(mut self, config: &C) -> Result<Self, ProvenanceError> {
        let json = serde_json::to_vec(config)?;
        self.config_digest = sha256_hex(&json);
        Ok(self)
    }
}

/// Write `provenance.json` into `dir`, creating the directory if needed.
pub fn write_manifest(dir: impl AsRef<Path>, manifest: &Provenance) -> Result<(), ProvenanceError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| ProvenanceError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(MANIFEST_FILE);
    let mut json = serde_json::to_vec_pretty(manifest)?;
    json.push(b'\n');
    fs::write(&path, json).map_err(|source| ProvenanceError::Io { path, source })
}

pub fn read_manifest(dir: impl AsRef<Path>) -> Result<Provenance, ProvenanceError> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let bytes = fs::read(&path).map_err(|source| ProvenanceError::Io {
        path: path.clone(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| ProvenanceError::Parse { path, source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn file_hash_matches_byte_hash() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("payload.bin");
        fs::write(&path, b"readability").unwrap();
        assert_eq!(hash_file(&path).unwrap(), sha256_hex(b"readability"));
    }

    #[test]
    fn manifest_round_trips_and_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = Provenance::new("train")
            .with_seed(42)
            .with_input_digest("corpus", sha256_hex(b"rows"))
            .with_config(&serde_json::json!({"n_trees": 500}))
            .unwrap();
        write_manifest(dir.path(), &manifest).unwrap();
        let first = fs::read(dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(read_manifest(dir.path()).unwrap(), manifest);

        write_manifest(dir.path(), &manifest).unwrap();
        let second = fs::read(dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn missing_manifest_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let err = read_manifest(dir.path()).unwrap_err();
        assert!(err.to_string().contains(MANIFEST_FILE));
    }
}
