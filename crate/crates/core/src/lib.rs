//! Core engine for batch art analysis with vision LLMs.
//!
//! The pipeline runs in five stages over an artwork corpus:
//!
//! 1. `corpus` — load and validate the artwork manifest (CSV or JSON-lines).
//! 2. `inquiry` + `gateway` — send each artwork image with an eight-question
//!    prompt to a vision chat provider, with caching, retries and rate limits.
//! 3. `extraction` — synthesize raw answers into a controlled facet taxonomy
//!    plus per-focus-area prose.
//! 4. `analytics` — temporal and cross-sectional facet distributions.
//! 5. `evaluation` + `reporting` — embed analysis texts against ground-truth
//!    style descriptions, score cosine similarity, summarize, and emit all
//!    datasets and charts into a run directory.
//!
//! All providers are remote endpoints speaking the OpenAI-compatible wire
//! protocol; deterministic seeded mocks are available for every provider kind.

pub mod analytics;
pub mod config;
pub mod corpus;
pub mod evaluation;
pub mod extraction;
pub mod gateway;
pub mod inquiry;
pub mod pipeline;
pub mod reporting;

pub use config::RunConfig;
pub use corpus::{ArtworkRecord, CorpusManifest};
pub use evaluation::{FocusArea, SimilarityScore, SimilarityStats};
pub use extraction::{FacetVocabulary, StructuredAnalysis};
pub use gateway::{ProviderConfig, ProviderKind, VisionResponse};
pub use inquiry::{InquirySet, Question};
