//! Tolerant parsing of synthesis output into [`StructuredAnalysis`], plus the
//! deterministic rule-based fallback extractor used when no text model is
//! configured and as the oracle in tests.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::themes::{default_theme_mapping, sentiment_of_themes, Sentiment};
use super::vocabulary::{normalize_label, normalize_text, FacetVocabulary};
use crate::evaluation::FocusArea;
use crate::inquiry::default_inquiry;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default)]
    pub vision_model: String,
    #[serde(default)]
    pub synth_model: String,
    #[serde(default)]
    pub analyzed_at: String,
    #[serde(default)]
    pub synthesized_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredAnalysis {
    pub artwork_id: String,
    /// Multiset of canonical labels (or `other:<raw>`) per facet; every
    /// vocabulary facet is present, possibly with an empty list.
    pub facet_labels: BTreeMap<String, Vec<String>>,
    /// Synthesized prose per focus area; all six keys always present.
    pub focus_text: BTreeMap<FocusArea, String>,
    pub emotional_themes: BTreeSet<String>,
    pub sentiment: Sentiment,
    #[serde(default)]
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl StructuredAnalysis {
    pub fn empty(artwork_id: &str, vocabulary: &FacetVocabulary) -> Self {
        StructuredAnalysis {
            artwork_id: artwork_id.to_string(),
            facet_labels: vocabulary
                .facet_names()
                .map(|f| (f.to_string(), Vec::new()))
                .collect(),
            focus_text: FocusArea::ALL.iter().map(|f| (*f, String::new())).collect(),
            emotional_themes: BTreeSet::new(),
            sentiment: Sentiment::Neutral,
            provenance: Provenance::default(),
            warnings: Vec::new(),
        }
    }
}

/// Unparseable synthesis output, preserved verbatim for audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParseFailure {
    pub artwork_id: String,
    pub reason: String,
    pub raw_text: String,
}

impl std::fmt::Display for ParseFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unparseable synthesis for {}: {}", self.artwork_id, self.reason)
    }
}

impl std::error::Error for ParseFailure {}

fn strip_code_fences(text: &str) -> Option<String> {
    let start = text.find("```")?;
    let after = &text[start + 3..];
    // skip an optional language tag line
    let body_start = after.find('\n').map(|i| i + 1).unwrap_or(0);
    let body = &after[body_start..];
    let end = body.find("```").unwrap_or(body.len());
    Some(body[..end].to_string())
}

fn brace_substring(text: &str) -> Option<String> {
    let start = text.find('{')?;
    let end = text.rfind('}')?;
    (end > start).then(|| text[start..=end].to_string())
}

fn try_parse_object(text: &str) -> Option<serde_json::Map<String, Value>> {
    let mut candidates: Vec<String> = vec![text.trim().to_string()];
    if let Some(fenced) = strip_code_fences(text) {
        candidates.push(fenced.trim().to_string());
    }
    for cand in candidates.clone() {
        if let Some(sub) = brace_substring(&cand) {
            candidates.push(sub);
        }
    }
    candidates.into_iter().find_map(|c| {
        serde_json::from_str::<Value>(&c)
            .ok()
            .and_then(|v| match v {
                Value::Object(m) => Some(m),
                _ => None,
            })
    })
}

fn labels_of_value(v: &Value) -> Vec<String> {
    match v {
        Value::String(s) => s
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect(),
        Value::Array(items) => items
            .iter()
            .flat_map(labels_of_value)
            .collect(),
        Value::Number(n) => vec![n.to_string()],
        _ => Vec::new(),
    }
}

/// Tolerant parse: strips code fences and surrounding prose, normalizes every
/// label, keeps unknown labels as `other:<raw>`, fills missing facets and
/// focus texts with empties plus a recorded warning. Never panics on
/// arbitrary input.
pub fn parse_structured(
    json_text: &str,
    vocabulary: &FacetVocabulary,
    artwork_id: &str,
) -> Result<StructuredAnalysis, ParseFailure> {
    let Some(object) = try_parse_object(json_text) else {
        return Err(ParseFailure {
            artwork_id: artwork_id.to_string(),
            reason: "no JSON object found after cleanup".to_string(),
            raw_text: json_text.to_string(),
        });
    };

    let mut analysis = StructuredAnalysis::empty(artwork_id, vocabulary);

    let facets_obj = match object.get("facets") {
        Some(Value::Object(m)) => m.clone(),
        _ => object.clone(), // tolerate facets at top level
    };
    for (facet, value) in &facets_obj {
        if !vocabulary.facets.contains_key(facet) {
            continue;
        }
        let mut labels: Vec<String> = labels_of_value(value)
            .iter()
            .map(|raw| normalize_label(raw, facet, vocabulary))
            .filter(|l| !l.is_empty() && l != "other:")
            .collect();
        labels.sort();
        analysis.facet_labels.insert(facet.clone(), labels);
    }
    for facet in vocabulary.facet_names() {
        if !facets_obj.contains_key(facet) {
            analysis
                .warnings
                .push(format!("missing facet {facet:?}, recorded as empty"));
        }
    }

    match object.get("focus_text") {
        Some(Value::Object(m)) => {
            for focus in FocusArea::ALL {
                match m.get(focus.key()).and_then(Value::as_str) {
                    Some(text) => {
                        analysis.focus_text.insert(focus, text.to_string());
                    }
                    None => analysis
                        .warnings
                        .push(format!("missing focus text {:?}, recorded as empty", focus.key())),
                }
            }
        }
        _ => analysis
            .warnings
            .push("missing focus_text object, all focus texts empty".to_string()),
    }

    if let Some(Value::Array(items)) = object.get("emotional_themes") {
        for item in items {
            if let Some(s) = item.as_str() {
                let t = s.trim().to_ascii_lowercase();
                if !t.is_empty() {
                    analysis.emotional_themes.insert(t);
                }
            }
        }
    }

    analysis.sentiment = object
        .get("sentiment")
        .and_then(Value::as_str)
        .and_then(Sentiment::parse)
        .unwrap_or_else(|| {
            sentiment_of_themes(&analysis.emotional_themes, &default_theme_mapping())
        });

    Ok(analysis)
}

/// Greedy phrase scan of normalized tokens: longer patterns consume their
/// tokens first so `Oversized/Large` is not double-counted by the
/// `oversized` and `large` synonyms.
fn scan_facet(tokens: &[&str], facet_def: &super::vocabulary::FacetDef) -> Vec<String> {
    let mut patterns: Vec<(Vec<String>, String)> = Vec::new();
    for label in &facet_def.labels {
        let toks: Vec<String> = normalize_text(label).split(' ').map(str::to_string).collect();
        patterns.push((toks, label.clone()));
    }
    for (syn, target) in &facet_def.synonyms {
        let toks: Vec<String> = normalize_text(syn).split(' ').map(str::to_string).collect();
        patterns.push((toks, target.clone()));
    }
    patterns.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));

    let mut consumed = vec![false; tokens.len()];
    let mut found: Vec<String> = Vec::new();
    for (pat, target) in &patterns {
        if pat.is_empty() || pat.iter().any(|t| t.is_empty()) {
            continue;
        }
        let mut i = 0;
        while i + pat.len() <= tokens.len() {
            let window_free = !consumed[i..i + pat.len()].iter().any(|&c| c);
            let matches = window_free
                && pat
                    .iter()
                    .zip(&tokens[i..i + pat.len()])
                    .all(|(p, t)| p == t);
            if matches {
                consumed[i..i + pat.len()].iter_mut().for_each(|c| *c = true);
                found.push(target.clone());
                i += pat.len();
            } else {
                i += 1;
            }
        }
    }
    found.sort();
    found
}

fn numbered_answers(raw_text: &str) -> BTreeMap<u8, String> {
    let mut answers: BTreeMap<u8, String> = BTreeMap::new();
    let mut current: Option<u8> = None;
    for line in raw_text.lines() {
        let trimmed = line.trim_start();
        let id = trimmed
            .split_once(['.', ')'])
            .and_then(|(head, _)| head.parse::<u8>().ok())
            .filter(|n| (1..=8).contains(n));
        if let Some(n) = id {
            current = Some(n);
        }
        if let Some(n) = current {
            let entry = answers.entry(n).or_default();
            if !entry.is_empty() {
                entry.push('\n');
            }
            entry.push_str(line.trim());
        }
    }
    answers
}

/// Deterministic keyword/synonym extraction straight from the raw
/// eight-answer text, with focus texts sliced by the default inquiry's
/// question tags (or the whole text when the answers are not numbered).
pub fn fallback_extract(
    raw_text: &str,
    vocabulary: &FacetVocabulary,
    artwork_id: &str,
) -> StructuredAnalysis {
    let mut analysis = StructuredAnalysis::empty(artwork_id, vocabulary);
    let normalized = normalize_text(raw_text);
    let tokens: Vec<&str> = normalized.split(' ').filter(|t| !t.is_empty()).collect();

    for (facet, def) in &vocabulary.facets {
        if def.open {
            continue; // open facets carry free text; nothing to scan against
        }
        let labels = scan_facet(&tokens, def);
        analysis.facet_labels.insert(facet.clone(), labels);
    }

    let mapping = default_theme_mapping();
    for theme in mapping.keys() {
        if tokens.contains(&theme.as_str()) {
            analysis.emotional_themes.insert(theme.clone());
        }
    }

    let sentiments = &analysis.facet_labels["sentiment"];
    analysis.sentiment = if sentiments.len() == 1 {
        Sentiment::parse(&sentiments[0])
            .unwrap_or_else(|| sentiment_of_themes(&analysis.emotional_themes, &mapping))
    } else {
        sentiment_of_themes(&analysis.emotional_themes, &mapping)
    };

    let answers = numbered_answers(raw_text);
    let inquiry = default_inquiry();
    for focus in FocusArea::ALL {
        let mut parts: Vec<&str> = Vec::new();
        for q in &inquiry.questions {
            if q.focus_tags.contains(&focus) {
                if let Some(ans) = answers.get(&q.id) {
                    parts.push(ans);
                }
            }
        }
        let text = if answers.is_empty() {
            raw_text.trim().to_string()
        } else {
            parts.join("\n")
        };
        analysis.focus_text.insert(focus, text);
    }

    analysis
}
