//! Scoring pass: embed each analysis's per-focus text and its ground-truth
//! style description, one cosine score per (provider, focus, artwork).
//! Style embeddings are computed once per (provider, style); every embedding
//! is cached on disk; failures become missing triples, never zeros.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{cosine_raw, EvalError, FocusArea, SimilarityScore};
use crate::corpus::CorpusManifest;
use crate::extraction::StructuredAnalysis;
use crate::gateway::{
    digest_parts, run_pool, with_retry, Clock, EmbedBackend, ProviderConfig, RateLimiter,
    ResponseCache,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StyleDescriptionSet {
    pub descriptions: BTreeMap<String, String>,
}

impl StyleDescriptionSet {
    pub fn from_file(path: &Path) -> std::io::Result<StyleDescriptionSet> {
        let text = std::fs::read_to_string(path)?;
        let descriptions: BTreeMap<String, String> =
            serde_json::from_str(&text).map_err(std::io::Error::other)?;
        Ok(StyleDescriptionSet { descriptions })
    }

    pub fn get(&self, style: &str) -> Option<&str> {
        self.descriptions
            .get(style.trim())
            .map(String::as_str)
            .filter(|d| !d.trim().is_empty())
    }
}

/// One embedding provider with its cache, rate limiter and retry policy.
pub struct Embedder {
    pub config: ProviderConfig,
    backend: Arc<dyn EmbedBackend>,
    cache: ResponseCache,
    limiter: RateLimiter,
    clock: Arc<dyn Clock>,
    memo: Mutex<HashMap<String, Arc<Vec<f64>>>>,
}

impl Embedder {
    pub fn new(
        config: ProviderConfig,
        backend: Arc<dyn EmbedBackend>,
        cache_dir: impl Into<PathBuf>,
        clock: Arc<dyn Clock>,
    ) -> Self {
        let limiter = RateLimiter::new(config.requests_per_minute, clock.clone());
        Embedder {
            config,
            backend,
            cache: ResponseCache::new(cache_dir),
            limiter,
            clock,
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// At most one provider call per distinct (model, text) pair per cache
    /// lifetime; repeats are memo or disk hits.
    pub fn embed_cached(&self, text: &str) -> Result<Arc<Vec<f64>>, String> {
        let digest = digest_parts(&["embed", &self.config.model_id, text]);
        if let Some(hit) = self.memo.lock().unwrap().get(&digest) {
            return Ok(hit.clone());
        }
        if let Some(hit) = self.cache.get::<Vec<f64>>(&self.config.model_id, &digest) {
            let v = Arc::new(hit);
            self.memo.lock().unwrap().insert(digest, v.clone());
            return Ok(v);
        }
        let clock = self.clock.clone();
        let (values, _attempts) = with_retry(
            &self.config.retry,
            |ms| clock.sleep_ms(ms),
            |_| {
                self.limiter.acquire();
                self.backend.embed(&self.config.model_id, text)
            },
        )
        .map_err(|e| e.to_string())?;
        self.cache
            .put(&self.config.model_id, &digest, &values)
            .map_err(|e| e.to_string())?;
        let v = Arc::new(values);
        self.memo.lock().unwrap().insert(digest, v.clone());
        Ok(v)
    }
}

/// A triple that produced no score, with the reason; excluded from
/// statistics and reported as coverage, never imputed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MissingScore {
    pub model_id: String,
    pub focus: FocusArea,
    pub artwork_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CorpusScores {
    pub scores: Vec<SimilarityScore>,
    pub missing: Vec<MissingScore>,
}

impl CorpusScores {
    pub fn coverage(&self) -> f64 {
        let total = self.scores.len() + self.missing.len();
        if total == 0 {
            return 1.0;
        }
        self.scores.len() as f64 / total as f64
    }
}

/// Scores every (provider, focus, artwork) triple. Fails fast if any
/// evaluated style lacks a description; per-triple provider failures and
/// empty focus texts are recorded as missing and the run continues.
pub fn embed_corpus(
    analyses: &[StructuredAnalysis],
    corpus: &CorpusManifest,
    styles: &StyleDescriptionSet,
    embedders: &[Embedder],
) -> Result<CorpusScores, EvalError> {
    if embedders.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let style_of: BTreeMap<&str, &str> = corpus
        .records
        .iter()
        .map(|r| (r.id.as_str(), r.style.as_str()))
        .collect();
    for analysis in analyses {
        let style = style_of.get(analysis.artwork_id.as_str()).copied().unwrap_or("");
        if styles.get(style).is_none() {
            return Err(EvalError::MissingStyleDescription(style.to_string()));
        }
    }

    let mut ordered: Vec<&StructuredAnalysis> = analyses.iter().collect();
    ordered.sort_by(|a, b| a.artwork_id.cmp(&b.artwork_id));

    let mut out = CorpusScores::default();
    for embedder in embedders {
        let model_id = embedder.config.model_id.clone();
        let per_artwork = run_pool(ordered.clone(), embedder.config.max_parallel, |analysis| {
            let mut scores = Vec::new();
            let mut missing = Vec::new();
            let style = style_of[analysis.artwork_id.as_str()];
            let description = styles.get(style).expect("checked above");
            for focus in FocusArea::ALL {
                let text = analysis.focus_text.get(&focus).map(String::as_str).unwrap_or("");
                if text.trim().is_empty() {
                    missing.push(MissingScore {
                        model_id: model_id.clone(),
                        focus,
                        artwork_id: analysis.artwork_id.clone(),
                        reason: "empty focus text".to_string(),
                    });
                    continue;
                }
                let pair = embedder
                    .embed_cached(text)
                    .and_then(|a| embedder.embed_cached(description).map(|b| (a, b)));
                match pair {
                    Ok((a, b)) => match cosine_raw(&a, &b) {
                        Ok(value) => scores.push(SimilarityScore {
                            model_id: model_id.clone(),
                            focus,
                            artwork_id: analysis.artwork_id.clone(),
                            style: style.to_string(),
                            value,
                        }),
                        Err(e) => missing.push(MissingScore {
                            model_id: model_id.clone(),
                            focus,
                            artwork_id: analysis.artwork_id.clone(),
                            reason: e.to_string(),
                        }),
                    },
                    Err(reason) => missing.push(MissingScore {
                        model_id: model_id.clone(),
                        focus,
                        artwork_id: analysis.artwork_id.clone(),
                        reason,
                    }),
                }
            }
            (scores, missing)
        });
        for (scores, missing) in per_artwork {
            out.scores.extend(scores);
            out.missing.extend(missing);
        }
    }
    Ok(out)
}
