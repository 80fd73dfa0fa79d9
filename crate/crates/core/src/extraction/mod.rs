//! Structured extraction: the controlled facet taxonomy, synthesis prompts,
//! tolerant parsing, label normalization and sentiment mapping.

mod parse;
mod synth;
mod themes;
mod vocabulary;

pub use parse::{fallback_extract, parse_structured, ParseFailure, Provenance, StructuredAnalysis};
pub use synth::{synthesis_prompt, synthesize};
pub use themes::{
    default_theme_mapping, sentiment_of_themes, theme_mapping_from_file, Sentiment, ThemeMapping,
};
pub use vocabulary::{
    default_vocabulary, normalize_label, normalize_text, FacetDef, FacetVocabulary,
    VocabularyError, OTHER_PREFIX,
};
