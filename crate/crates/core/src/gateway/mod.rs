//! Provider gateway: OpenAI-compatible chat and embedding backends with
//! bounded concurrency, retries, rate limiting and an idempotent file cache.
//!
//! No model ever runs in-process. Backends are trait objects so the HTTP
//! client, scripted fakes and seeded mocks are interchangeable.

mod cache;
mod http;
mod mock;
mod pool;
mod rate_limit;
mod retry;

pub use cache::{cache_key, digest_parts, ResponseCache};
pub use http::{HttpChatBackend, HttpEmbedBackend};
pub use mock::{MockTextBackend, MockVisionBackend, SYNTH_RAW_MARKER};
pub use pool::run_pool;
pub use rate_limit::{Clock, RateLimiter, SimClock, SystemClock};
pub use retry::{with_retry, CallError, RetryExhausted, RetryPolicy};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ArtworkRecord;
use crate::inquiry::{render_prompt, InquirySet, RenderOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    VisionChat,
    TextChat,
    Embedding,
}

impl ProviderKind {
    pub fn default_auth_env_var(self) -> &'static str {
        match self {
            ProviderKind::VisionChat => "VISION_API_KEY",
            ProviderKind::TextChat => "TEXT_API_KEY",
            ProviderKind::Embedding => "EMBED_API_KEY",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    #[serde(default)]
    pub endpoint_url: String,
    pub model_id: String,
    #[serde(default)]
    pub auth_env_var: String,
    #[serde(default = "default_max_parallel")]
    pub max_parallel: usize,
    #[serde(default = "default_rpm")]
    pub requests_per_minute: f64,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default)]
    pub temperature: f64,
}

fn default_max_parallel() -> usize {
    4
}
fn default_rpm() -> f64 {
    60.0
}

impl ProviderConfig {
    pub fn new(kind: ProviderKind, model_id: &str) -> Self {
        ProviderConfig {
            kind,
            endpoint_url: String::new(),
            model_id: model_id.to_string(),
            auth_env_var: kind.default_auth_env_var().to_string(),
            max_parallel: default_max_parallel(),
            requests_per_minute: default_rpm(),
            retry: RetryPolicy::default(),
            temperature: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.model_id.is_empty() {
            return Err("provider.model_id must be non-empty".into());
        }
        if self.max_parallel < 1 {
            return Err("provider.max_parallel must be >= 1".into());
        }
        if self.requests_per_minute <= 0.0 {
            return Err("provider.requests_per_minute must be positive".into());
        }
        if self.temperature < 0.0 {
            return Err("provider.temperature must be >= 0".into());
        }
        self.retry.validate()
    }

    pub fn auth_env_var_or_default(&self) -> String {
        if self.auth_env_var.is_empty() {
            self.kind.default_auth_env_var().to_string()
        } else {
            self.auth_env_var.clone()
        }
    }
}

/// One message in an OpenAI-compatible chat request.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatMessage {
    pub role: &'static str,
    pub parts: Vec<ContentPart>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContentPart {
    Text(String),
    /// Remote URL or base64 data URL.
    ImageUrl(String),
}

impl ChatMessage {
    pub fn user_text(text: impl Into<String>) -> Self {
        ChatMessage {
            role: "user",
            parts: vec![ContentPart::Text(text.into())],
        }
    }

    /// Concatenated text parts, ignoring images.
    pub fn text(&self) -> String {
        self.parts
            .iter()
            .filter_map(|p| match p {
                ContentPart::Text(t) => Some(t.as_str()),
                ContentPart::ImageUrl(_) => None,
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// A chat-completions provider (vision or text).
pub trait ChatBackend: Send + Sync {
    fn chat(
        &self,
        model_id: &str,
        messages: &[ChatMessage],
        temperature: f64,
    ) -> Result<String, CallError>;

    /// Whether image content parts must be resolved and attached.
    /// Mocks answer from artwork metadata alone and skip image loading.
    fn needs_images(&self) -> bool {
        true
    }
}

/// An embeddings provider.
pub trait EmbedBackend: Send + Sync {
    fn embed(&self, model_id: &str, text: &str) -> Result<Vec<f64>, CallError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisionResponse {
    pub artwork_id: String,
    pub model_id: String,
    pub prompt_digest: String,
    pub raw_text: String,
    pub received_at: String,
    pub attempt_count: u32,
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("image unreadable: {0}")]
    ImageUnreadable(String),
    #[error("{0}")]
    Exhausted(#[from] RetryExhausted),
    #[error("provider returned empty response")]
    EmptyResponse,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Wall-clock source for `received_at` stamps. Mock runs pin a fixed stamp
/// so cached artifacts stay byte-reproducible.
#[derive(Clone)]
pub enum Timestamps {
    System,
    Fixed(String),
}

impl Timestamps {
    pub fn now(&self) -> String {
        match self {
            Timestamps::System => chrono::Utc::now().to_rfc3339(),
            Timestamps::Fixed(s) => s.clone(),
        }
    }
}

/// Drives one chat provider with cache, rate limit and retry around every call.
pub struct ChatGateway {
    pub config: ProviderConfig,
    backend: Arc<dyn ChatBackend>,
    cache: ResponseCache,
    limiter: RateLimiter,
    clock: Arc<dyn Clock>,
    timestamps: Timestamps,
}

impl ChatGateway {
    pub fn new(
        config: ProviderConfig,
        backend: Arc<dyn ChatBackend>,
        cache_dir: impl Into<std::path::PathBuf>,
        clock: Arc<dyn Clock>,
        timestamps: Timestamps,
    ) -> Self {
        let limiter = RateLimiter::new(config.requests_per_minute, clock.clone());
        ChatGateway {
            config,
            backend,
            cache: ResponseCache::new(cache_dir),
            limiter,
            clock,
            timestamps,
        }
    }

    pub fn cache(&self) -> &ResponseCache {
        &self.cache
    }

    /// Cache-or-call for an arbitrary prompt keyed by `(subject_id, prompt, model)`.
    pub fn complete_cached(
        &self,
        subject_id: &str,
        prompt: &str,
        messages: &[ChatMessage],
    ) -> Result<VisionResponse, GatewayError> {
        let digest = cache_key(subject_id, prompt, &self.config.model_id);
        if let Some(hit) = self.cache.get::<VisionResponse>(&self.config.model_id, &digest) {
            return Ok(hit);
        }
        let clock = self.clock.clone();
        let (raw_text, attempts) = with_retry(
            &self.config.retry,
            |ms| clock.sleep_ms(ms),
            |_| {
                self.limiter.acquire();
                self.backend
                    .chat(&self.config.model_id, messages, self.config.temperature)
            },
        )?;
        if raw_text.trim().is_empty() {
            return Err(GatewayError::EmptyResponse);
        }
        let response = VisionResponse {
            artwork_id: subject_id.to_string(),
            model_id: self.config.model_id.clone(),
            prompt_digest: digest.clone(),
            raw_text,
            received_at: self.timestamps.now(),
            attempt_count: attempts,
        };
        self.cache.put(&self.config.model_id, &digest, &response)?;
        Ok(response)
    }

    /// Sends the artwork image plus the rendered inquiry, serving from cache
    /// when an identical (artwork, inquiry, model) call has already completed.
    pub fn analyze_artwork(
        &self,
        record: &ArtworkRecord,
        inquiry: &InquirySet,
    ) -> Result<VisionResponse, GatewayError> {
        let prompt = render_prompt(inquiry, &RenderOptions::default());
        let digest = cache_key(&record.id, &prompt, &self.config.model_id);
        if let Some(hit) = self.cache.get::<VisionResponse>(&self.config.model_id, &digest) {
            return Ok(hit);
        }
        let mut parts = vec![ContentPart::Text(prompt.clone())];
        if self.backend.needs_images() {
            parts.push(ContentPart::ImageUrl(http::resolve_image(&record.image_ref)?));
        }
        // mocks key their answers off the artwork metadata carried in the system part
        let messages = vec![
            ChatMessage {
                role: "system",
                parts: vec![ContentPart::Text(format!("artwork_id: {}", record.id))],
            },
            ChatMessage { role: "user", parts },
        ];
        self.complete_cached(&record.id, &prompt, &messages)
    }
}

/// Per-artwork outcome of a batch stage. Failures are data, not crashes:
/// refusals and exhausted retries are recorded and the run continues.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchOutcome<T> {
    pub artwork_id: String,
    #[serde(flatten)]
    pub result: BatchResult<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BatchResult<T> {
    Ok { value: T },
    Failed { reason: String },
}

impl<T> BatchOutcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match &self.result {
            BatchResult::Ok { value } => Some(value),
            BatchResult::Failed { .. } => None,
        }
    }
}

/// Analyzes every record with bounded parallelism; output is sorted by
/// artwork id so downstream stages are independent of completion order.
pub fn analyze_batch(
    gateway: &ChatGateway,
    records: &[ArtworkRecord],
    inquiry: &InquirySet,
) -> Vec<BatchOutcome<VisionResponse>> {
    let items: Vec<&ArtworkRecord> = records.iter().collect();
    let mut outcomes = run_pool(items, gateway.config.max_parallel, |rec| {
        let result = match gateway.analyze_artwork(rec, inquiry) {
            Ok(value) => BatchResult::Ok { value },
            Err(e) => BatchResult::Failed {
                reason: e.to_string(),
            },
        };
        BatchOutcome {
            artwork_id: rec.id.clone(),
            result,
        }
    });
    outcomes.sort_by(|a, b| a.artwork_id.cmp(&b.artwork_id));
    outcomes
}
