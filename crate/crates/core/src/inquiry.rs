//! The eight-question technical/expressive inquiry sent with each artwork
//! image. The shipped set covers one question per criteria group and is
//! fully user-overridable via a JSON file.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::FocusArea;

pub const QUESTION_COUNT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: u8,
    pub focus_tags: BTreeSet<FocusArea>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InquirySet {
    pub questions: Vec<Question>,
    pub version: String,
}

#[derive(Debug, Error)]
pub enum InquiryError {
    #[error("inquiry must contain exactly {QUESTION_COUNT} questions with ids 1..8 in order")]
    BadShape,
    #[error("question {0} has empty text")]
    EmptyText(u8),
    #[error("question {0} has no focus tags")]
    NoFocusTags(u8),
    #[error("cannot read inquiry file: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid inquiry json: {0}")]
    Json(#[from] serde_json::Error),
}

impl InquirySet {
    pub fn validate(&self) -> Result<(), InquiryError> {
        if self.questions.len() != QUESTION_COUNT {
            return Err(InquiryError::BadShape);
        }
        for (i, q) in self.questions.iter().enumerate() {
            if q.id as usize != i + 1 {
                return Err(InquiryError::BadShape);
            }
            if q.text.trim().is_empty() {
                return Err(InquiryError::EmptyText(q.id));
            }
            if q.focus_tags.is_empty() {
                return Err(InquiryError::NoFocusTags(q.id));
            }
        }
        Ok(())
    }

    /// Loads a user override: a JSON array of `{id, focus_tags, text}`.
    pub fn from_file(path: &Path) -> Result<InquirySet, InquiryError> {
        let text = std::fs::read_to_string(path)?;
        let questions: Vec<Question> = serde_json::from_str(&text)?;
        let set = InquirySet {
            questions,
            version: format!("file:{}", path.display()),
        };
        set.validate()?;
        Ok(set)
    }
}

/// The shipped default set: one question per criteria group.
pub fn default_inquiry() -> InquirySet {
    use FocusArea::*;
    let q = |id: u8, tags: &[FocusArea], text: &str| Question {
        id,
        focus_tags: tags.iter().copied().collect(),
        text: text.to_string(),
    };
    let set = InquirySet {
        version: "builtin-1".to_string(),
        questions: vec![
            q(1, &[FormScale],
              "What dominant forms and shapes structure the composition, and at what scale are the subjects rendered relative to reality?"),
            q(2, &[LightContrast],
              "How are light, shadow and contrast handled, and what effect and purpose do they serve in the composition?"),
            q(3, &[Material],
              "What materials and mediums were used to produce the work?"),
            q(4, &[Techniques],
              "Which techniques and textures did the artist employ, and how do they shape the surface of the work?"),
            q(5, &[Colors],
              "Describe the color palette and overall tone, and the emotional themes the colors evoke."),
            q(6, &[FormScale],
              "What kinds of figures and objects are depicted, and how are they arranged?"),
            q(7, &[Movement],
              "How is movement represented or suggested within the composition?"),
            q(8, &[Colors],
              "What time of day or season is portrayed, and what is the overall conceptual reading of the work?"),
        ],
    };
    debug_assert!(set.validate().is_ok());
    set
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub numbering: bool,
    pub preamble: Option<String>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            numbering: true,
            preamble: Some(default_preamble().to_string()),
        }
    }
}

/// Instructs the model to answer each question separately with concrete
/// labels, which keeps the synthesis stage parseable.
pub fn default_preamble() -> &'static str {
    "You are an expert art analyst. Answer each of the following questions \
     about the attached artwork separately, keeping the question's number, \
     and name concrete labels for forms, scale, materials, techniques, \
     lighting, colors, figures, movement, time of day and season."
}

/// Deterministic text: optional preamble, then the questions in order,
/// numbered `1.` .. `8.` when `numbering` is set.
pub fn render_prompt(inquiry: &InquirySet, options: &RenderOptions) -> String {
    let mut out = String::new();
    if let Some(preamble) = &options.preamble {
        out.push_str(preamble);
        out.push_str("\n\n");
    }
    for q in &inquiry.questions {
        if options.numbering {
            out.push_str(&format!("{}. {}\n", q.id, q.text));
        } else {
            out.push_str(&q.text);
            out.push('\n');
        }
    }
    out
}
