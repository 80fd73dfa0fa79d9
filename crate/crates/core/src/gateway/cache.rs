//! Idempotent on-disk response cache: one JSON file per response at
//! `cache_dir/<model_id>/<digest>.json`, written via write-then-rename so
//! concurrent readers never observe a partial file.

use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Serialize};
use sha2::{Digest, Sha256};

/// Collision-resistant digest over length-prefixed UTF-8 parts, stable across
/// platforms. Used for response cache keys and config digests.
pub fn digest_parts(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update((p.len() as u64).to_be_bytes());
        hasher.update(p.as_bytes());
    }
    hex_lower(&hasher.finalize())
}

fn hex_lower(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Cache key for a vision/synthesis call.
pub fn cache_key(artwork_id: &str, prompt: &str, model_id: &str) -> String {
    digest_parts(&[artwork_id, prompt, model_id])
}

pub struct ResponseCache {
    root: PathBuf,
}

impl ResponseCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ResponseCache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path_for(&self, model_id: &str, digest: &str) -> PathBuf {
        // model ids may contain path-hostile characters
        let safe: String = model_id
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' || c == '_' { c } else { '_' })
            .collect();
        self.root.join(safe).join(format!("{digest}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, model_id: &str, digest: &str) -> Option<T> {
        let path = self.path_for(model_id, digest);
        let bytes = std::fs::read(path).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    pub fn put<T: Serialize>(&self, model_id: &str, digest: &str, value: &T) -> std::io::Result<()> {
        let path = self.path_for(model_id, digest);
        let dir = path.parent().unwrap();
        std::fs::create_dir_all(dir)?;
        // unique tmp name: concurrent writers of the same key must not share
        // a staging file, or one rename races the other's write
        static TMP_SEQ: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
        let seq = TMP_SEQ.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        let tmp = dir.join(format!(".{digest}.{}.{seq}.tmp", std::process::id()));
        let body = serde_json::to_vec_pretty(value)?;
        std::fs::write(&tmp, body)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn contains(&self, model_id: &str, digest: &str) -> bool {
        self.path_for(model_id, digest).exists()
    }
}
