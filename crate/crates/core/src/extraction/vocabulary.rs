//! Controlled facet taxonomy: canonical label sets plus synonym tables,
//! and the normalization pipeline that maps raw model output onto them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const OTHER_PREFIX: &str = "other:";

const DEFAULT_VOCABULARY_JSON: &str = include_str!("../data/vocabulary.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetDef {
    pub labels: Vec<String>,
    #[serde(default)]
    pub synonyms: BTreeMap<String, String>,
    /// Open facets (e.g. palette colors) accept any normalized value.
    #[serde(default)]
    pub open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetVocabulary {
    pub version: String,
    pub facets: BTreeMap<String, FacetDef>,
}

#[derive(Debug, Error)]
pub enum VocabularyError {
    #[error("facet {facet:?}: duplicate canonical label {label:?}")]
    DuplicateLabel { facet: String, label: String },
    #[error("facet {facet:?}: synonym {raw:?} targets unknown label {target:?}")]
    DanglingSynonym {
        facet: String,
        raw: String,
        target: String,
    },
    #[error("cannot read vocabulary file: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid vocabulary json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Text canonicalization shared by matching and scanning: lowercase,
/// punctuation to spaces, collapsed whitespace.
pub fn normalize_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut last_space = true;
    for c in raw.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
            last_space = false;
        } else if !last_space {
            out.push(' ');
            last_space = true;
        }
    }
    while out.ends_with(' ') {
        out.pop();
    }
    out
}

impl FacetVocabulary {
    pub fn validate(&self) -> Result<(), VocabularyError> {
        for (facet, def) in &self.facets {
            let mut seen = std::collections::HashSet::new();
            for label in &def.labels {
                if !seen.insert(normalize_text(label)) {
                    return Err(VocabularyError::DuplicateLabel {
                        facet: facet.clone(),
                        label: label.clone(),
                    });
                }
            }
            for (raw, target) in &def.synonyms {
                if !def.labels.iter().any(|l| l == target) {
                    return Err(VocabularyError::DanglingSynonym {
                        facet: facet.clone(),
                        raw: raw.clone(),
                        target: target.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<FacetVocabulary, VocabularyError> {
        let text = std::fs::read_to_string(path)?;
        let vocab: FacetVocabulary = serde_json::from_str(&text)?;
        vocab.validate()?;
        Ok(vocab)
    }

    pub fn facet_names(&self) -> impl Iterator<Item = &str> {
        self.facets.keys().map(String::as_str)
    }
}

/// The shipped taxonomy.
pub fn default_vocabulary() -> FacetVocabulary {
    let vocab: FacetVocabulary =
        serde_json::from_str(DEFAULT_VOCABULARY_JSON).expect("builtin vocabulary parses");
    debug_assert!(vocab.validate().is_ok());
    vocab
}

/// Normalization pipeline: trim → lowercase → strip punctuation → exact
/// canonical match → synonym match → fallback `other:<raw>`. Open facets
/// accept the normalized value as canonical. Never guesses beyond the
/// synonym table; idempotent on its own output.
pub fn normalize_label(raw: &str, facet: &str, vocabulary: &FacetVocabulary) -> String {
    let trimmed = raw.trim();
    if trimmed.starts_with(OTHER_PREFIX) {
        return trimmed.to_string();
    }
    let norm = normalize_text(trimmed);
    let Some(def) = vocabulary.facets.get(facet) else {
        return format!("{OTHER_PREFIX}{trimmed}");
    };
    if def.open {
        return norm;
    }
    for label in &def.labels {
        if normalize_text(label) == norm {
            return label.clone();
        }
    }
    for (syn, target) in &def.synonyms {
        if normalize_text(syn) == norm {
            return target.clone();
        }
    }
    format!("{OTHER_PREFIX}{trimmed}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_vocabulary_is_valid() {
        let v = default_vocabulary();
        v.validate().unwrap();
        assert_eq!(v.facets["form"].labels.len(), 4);
        assert!(v.facets["palette"].open);
    }

    #[test]
    fn synonym_lookup() {
        let v = default_vocabulary();
        assert_eq!(normalize_label("Oversized", "scale", &v), "Oversized/Large");
        assert_eq!(normalize_label("night-time", "time_of_day", &v), "Night");
    }

    #[test]
    fn case_and_punctuation_rules() {
        let v = default_vocabulary();
        assert_eq!(normalize_label("POINTILLISM.", "technique", &v), "Pointillism");
    }

    #[test]
    fn unknown_falls_back_to_other() {
        let v = default_vocabulary();
        assert_eq!(normalize_label("sfumato", "technique", &v), "other:sfumato");
    }

    #[test]
    fn normalization_is_idempotent() {
        let v = default_vocabulary();
        for raw in ["Oversized", "sfumato", "POINTILLISM.", "", "other:x", "Muted"] {
            for facet in v.facets.keys() {
                let once = normalize_label(raw, facet, &v);
                assert_eq!(normalize_label(&once, facet, &v), once, "{facet}/{raw}");
            }
        }
    }

    #[test]
    fn every_canonical_label_is_a_fixed_point() {
        let v = default_vocabulary();
        for (facet, def) in &v.facets {
            for label in &def.labels {
                assert_eq!(&normalize_label(label, facet, &v), label);
            }
        }
    }

    #[test]
    fn every_synonym_maps_to_documented_canonical() {
        let v = default_vocabulary();
        for (facet, def) in &v.facets {
            for (raw, target) in &def.synonyms {
                assert_eq!(&normalize_label(raw, facet, &v), target, "{facet}/{raw}");
            }
        }
    }

    #[test]
    fn json_file_round_trip() {
        let v = default_vocabulary();
        let file = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
        std::fs::write(file.path(), serde_json::to_string_pretty(&v).unwrap()).unwrap();
        let reloaded = FacetVocabulary::from_file(file.path()).unwrap();
        assert_eq!(reloaded, v);
    }

    #[test]
    fn dangling_synonym_rejected() {
        let mut v = default_vocabulary();
        v.facets
            .get_mut("form")
            .unwrap()
            .synonyms
            .insert("weird".into(), "NotALabel".into());
        assert!(matches!(
            v.validate(),
            Err(VocabularyError::DanglingSynonym { .. })
        ));
    }
}
