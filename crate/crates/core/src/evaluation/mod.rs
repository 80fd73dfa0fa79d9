//! Embedding-based evaluation: cosine similarity between per-focus analysis
//! texts and ground-truth style descriptions, with five-number summaries per
//! embedding model and pooled across models.

mod embed;
mod mock;
mod stats;
mod treemap;

pub use embed::{embed_corpus, CorpusScores, Embedder, MissingScore, StyleDescriptionSet};
pub use mock::MockEmbedBackend;
pub use stats::{five_number_summary, sbon_aggregate, table1_stats, FiveNumberSummary};
pub use treemap::{treemap_by_hierarchy, TreemapKey, TreemapNode};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The six evaluation dimensions. Short codes follow the usual
/// focus-area abbreviations (F/S, CLR, L/C, MVT, MAT, TCH).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FocusArea {
    #[serde(rename = "form_scale")]
    FormScale,
    #[serde(rename = "colors")]
    Colors,
    #[serde(rename = "light_contrast")]
    LightContrast,
    #[serde(rename = "movement")]
    Movement,
    #[serde(rename = "material")]
    Material,
    #[serde(rename = "techniques")]
    Techniques,
}

impl FocusArea {
    pub const ALL: [FocusArea; 6] = [
        FocusArea::FormScale,
        FocusArea::Colors,
        FocusArea::LightContrast,
        FocusArea::Movement,
        FocusArea::Material,
        FocusArea::Techniques,
    ];

    pub fn code(self) -> &'static str {
        match self {
            FocusArea::FormScale => "F/S",
            FocusArea::Colors => "CLR",
            FocusArea::LightContrast => "L/C",
            FocusArea::Movement => "MVT",
            FocusArea::Material => "MAT",
            FocusArea::Techniques => "TCH",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            FocusArea::FormScale => "Form/Scale",
            FocusArea::Colors => "Colors",
            FocusArea::LightContrast => "Light/Contrast",
            FocusArea::Movement => "Movement",
            FocusArea::Material => "Material",
            FocusArea::Techniques => "Techniques",
        }
    }

    /// Stable key used in JSON files and config.
    pub fn key(self) -> &'static str {
        match self {
            FocusArea::FormScale => "form_scale",
            FocusArea::Colors => "colors",
            FocusArea::LightContrast => "light_contrast",
            FocusArea::Movement => "movement",
            FocusArea::Material => "material",
            FocusArea::Techniques => "techniques",
        }
    }

    pub fn from_key(key: &str) -> Option<FocusArea> {
        FocusArea::ALL
            .into_iter()
            .find(|f| f.key() == key || f.code() == key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub model_id: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub model_id: String,
    pub focus: FocusArea,
    pub artwork_id: String,
    pub style: String,
    pub value: f64,
}

/// One Table-1-style row: a five-number summary for a (model, focus) group,
/// where `group_model` is a model id or the pooled "SBON" group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityStats {
    pub group_model: String,
    pub focus: FocusArea,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("model mismatch: {0} vs {1}")]
    ModelMismatch(String, String),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("non-finite component in embedding")]
    NonFinite,
    #[error("empty input")]
    EmptyInput,
    #[error("no style description for style {0:?}")]
    MissingStyleDescription(String),
}

/// Cosine similarity, clamped to [-1, 1] to absorb rounding.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, EvalError> {
    if a.model_id != b.model_id {
        return Err(EvalError::ModelMismatch(a.model_id.clone(), b.model_id.clone()));
    }
    cosine_raw(&a.values, &b.values)
}

pub fn cosine_raw(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::DimensionMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        if !x.is_finite() || !y.is_finite() {
            return Err(EvalError::NonFinite);
        }
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(EvalError::ZeroVector);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecf(values: &[f64]) -> EmbeddingVector {
        EmbeddingVector {
            model_id: "m".into(),
            values: values.to_vec(),
        }
    }

    #[test]
    fn cosine_self_is_one() {
        let v = vecf(&[0.3, -1.2, 4.0]);
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn cosine_orthogonal() {
        assert_eq!(cosine(&vecf(&[1.0, 0.0]), &vecf(&[0.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn cosine_hand_computed() {
        // dot = 2 + 2 + 4 = 8, |a| = |b| = 3
        let got = cosine(&vecf(&[1.0, 2.0, 2.0]), &vecf(&[2.0, 1.0, 2.0])).unwrap();
        assert!((got - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(
            cosine(&vecf(&[1.0]), &vecf(&[1.0, 2.0])),
            Err(EvalError::DimensionMismatch(1, 2))
        ));
        assert!(matches!(
            cosine(&vecf(&[0.0, 0.0]), &vecf(&[1.0, 0.0])),
            Err(EvalError::ZeroVector)
        ));
        let other = EmbeddingVector {
            model_id: "n".into(),
            values: vec![1.0],
        };
        assert!(matches!(
            cosine(&vecf(&[1.0]), &other),
            Err(EvalError::ModelMismatch(_, _))
        ));
    }

    #[test]
    fn focus_area_has_six_members_with_stable_codes() {
        assert_eq!(FocusArea::ALL.len(), 6);
        let codes: Vec<_> = FocusArea::ALL.iter().map(|f| f.code()).collect();
        assert_eq!(codes, ["F/S", "CLR", "L/C", "MVT", "MAT", "TCH"]);
        for f in FocusArea::ALL {
            assert_eq!(FocusArea::from_key(f.key()), Some(f));
            assert_eq!(FocusArea::from_key(f.code()), Some(f));
        }
    }
}
