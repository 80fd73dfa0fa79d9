//! Seeded mock embedding provider: hashes the token multiset of a text into
//! `dim` buckets and length-normalizes. Identical texts map to identical
//! vectors; overlapping token multisets score higher cosine.

use sha2::{Digest, Sha256};

use crate::extraction::normalize_text;
use crate::gateway::{CallError, EmbedBackend};

pub struct MockEmbedBackend {
    seed: u64,
    dim: usize,
}

impl MockEmbedBackend {
    pub fn new(seed: u64, dim: usize) -> Self {
        assert!(dim >= 2, "mock embedder needs dim >= 2");
        MockEmbedBackend { seed, dim }
    }

    pub fn bucket(&self, token: &str) -> usize {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(token.as_bytes());
        let digest = hasher.finalize();
        let mut eight = [0u8; 8];
        eight.copy_from_slice(&digest[..8]);
        (u64::from_be_bytes(eight) % self.dim as u64) as usize
    }
}

impl EmbedBackend for MockEmbedBackend {
    fn embed(&self, _model_id: &str, text: &str) -> Result<Vec<f64>, CallError> {
        let mut values = vec![0.0f64; self.dim];
        for token in normalize_text(text).split(' ').filter(|t| !t.is_empty()) {
            values[self.bucket(token)] += 1.0;
        }
        let norm: f64 = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        } else {
            // empty text still embeds: a constant unit direction
            values[0] = 1.0;
        }
        Ok(values)
    }
}
