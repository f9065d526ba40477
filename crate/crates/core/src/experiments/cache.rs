//! On-disk cache for sector spectra and per-point sweep results.
//!
//! Entries are JSON files named by a SHA-256 of every compute-relevant
//! field, so parameter or option changes can never collide with stale
//! results. Sweeps flush each point as it completes; rerunning an
//! interrupted sweep picks up from whatever is on disk.

use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::spin_model::{Parity, SpinChainParams};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV_VAR: &str = "KRYLOV_SPREAD_CACHE";

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    /// Use `$KRYLOV_SPREAD_CACHE` when set, otherwise `fallback`.
    pub fn from_env_or(fallback: impl Into<PathBuf>) -> Self {
        match std::env::var_os(CACHE_ENV_VAR) {
            Some(dir) if !dir.is_empty() => Self::new(PathBuf::from(dir)),
            _ => Self::new(fallback),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_for(&self, kind: &str, key: &str) -> PathBuf {
        self.root.join(kind).join(format!("{key}.json"))
    }

    pub fn load<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Option<T> {
        let bytes = std::fs::read(self.path_for(kind, key)).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    pub fn store<T: Serialize>(&self, kind: &str, key: &str, value: &T) -> Result<()> {
        let path = self.path_for(kind, key);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        // write-then-rename keeps a crashed run from leaving a torn file
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_vec(value)?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn spectrum_key(params: &SpinChainParams, sector: Parity) -> String {
        hash_fields(&[
            ("kind", "spectrum".into()),
            ("l", params.l.to_string()),
            ("j", float_key(params.j)),
            ("hx", float_key(params.hx)),
            ("hz", float_key(params.hz)),
            ("sector", sector.to_string()),
        ])
    }

    pub fn load_spectrum(&self, params: &SpinChainParams, sector: Parity) -> Option<Vec<f64>> {
        self.load("spectra", &Self::spectrum_key(params, sector))
    }

    pub fn store_spectrum(&self, params: &SpinChainParams, sector: Parity, energies: &[f64]) -> Result<()> {
        self.store("spectra", &Self::spectrum_key(params, sector), &energies)
    }
}

/// Canonical float formatting for hash keys (shortest round-trip form).
pub fn float_key(v: f64) -> String {
    format!("{v:?}")
}

/// SHA-256 of `name=value` lines.
pub fn hash_fields(fields: &[(&str, String)]) -> String {
    let mut hasher = Sha256::new();
    for (name, value) in fields {
        hasher.update(name.as_bytes());
        hasher.update(b"=");
        hasher.update(value.as_bytes());
        hasher.update(b"\n");
    }
    hex_string(&hasher.finalize())
}

/// SHA-256 of an arbitrary string.
pub fn hash_str(s: &str) -> String {
    hex_string(&Sha256::digest(s.as_bytes()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
