//! Deterministic seeded mock providers. The vision mock generates plausible
//! eight-answer texts whose labels come straight from the vocabulary, keyed
//! by artwork id so the whole corpus reproduces byte-for-byte per seed. The
//! text mock synthesizes via the rule-based extractor, so mock pipelines are
//! coherent end to end.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::{CallError, ChatBackend, ChatMessage};
use crate::extraction::{
    default_theme_mapping, fallback_extract, sentiment_of_themes, FacetVocabulary, Sentiment,
};

/// Separator between the synthesis instructions and the raw material in the
/// synthesis prompt; the text mock answers from everything after it.
pub const SYNTH_RAW_MARKER: &str = "RAW ANALYSIS:\n";

const PALETTE_COLORS: [&str; 8] = [
    "azure", "crimson", "ochre", "emerald", "indigo", "umber", "scarlet", "teal",
];

/// (facet, min picks, max picks) in emission order. Labels named `Other` or
/// `Unspecified` are never picked, so extraction of mock output never lands
/// in a fallback bucket.
const FACET_PLAN: [(&str, usize, usize); 12] = [
    ("form", 1, 2),
    ("scale", 1, 1),
    ("light_effect", 1, 1),
    ("light_type", 1, 1),
    ("light_purpose", 1, 2),
    ("material", 1, 2),
    ("technique", 1, 2),
    ("color_tone", 1, 2),
    ("figure_type", 1, 1),
    ("movement_representation", 1, 1),
    ("time_of_day", 1, 1),
    ("season", 1, 1),
];

fn rng_for(seed: u64, artwork_id: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(artwork_id.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MockPicks {
    pub facet_labels: BTreeMap<String, Vec<String>>,
    pub palette: Vec<String>,
    pub themes: Vec<String>,
    pub sentiment: Sentiment,
}

pub struct MockVisionBackend {
    seed: u64,
    vocabulary: FacetVocabulary,
}

impl MockVisionBackend {
    pub fn new(seed: u64, vocabulary: FacetVocabulary) -> Self {
        MockVisionBackend { seed, vocabulary }
    }

    /// The labels this backend embeds for one artwork; pure in (seed, id).
    pub fn picks(&self, artwork_id: &str) -> MockPicks {
        let mut rng = rng_for(self.seed, artwork_id);
        let mut facet_labels = BTreeMap::new();
        for (facet, lo, hi) in FACET_PLAN {
            let def = &self.vocabulary.facets[facet];
            let candidates: Vec<&String> = def
                .labels
                .iter()
                .filter(|l| *l != "Other" && *l != "Unspecified")
                .collect();
            let n = rng.gen_range(lo..=hi.min(candidates.len()));
            let chosen: Vec<String> = candidates
                .choose_multiple(&mut rng, n)
                .map(|l| (*l).clone())
                .collect();
            facet_labels.insert(facet.to_string(), chosen);
        }
        let n_palette = rng.gen_range(1..=3);
        let palette: Vec<String> = PALETTE_COLORS
            .choose_multiple(&mut rng, n_palette)
            .map(|s| s.to_string())
            .collect();
        let mapping = default_theme_mapping();
        let theme_names: Vec<&String> = mapping.keys().collect();
        let n_themes = rng.gen_range(1..=3);
        let themes: Vec<String> = theme_names
            .choose_multiple(&mut rng, n_themes)
            .map(|t| (*t).clone())
            .collect();
        let theme_set = themes.iter().cloned().collect();
        let sentiment = sentiment_of_themes(&theme_set, &mapping);
        MockPicks {
            facet_labels,
            palette,
            themes,
            sentiment,
        }
    }

    /// Sorted per-facet label multisets over all closed facets, shaped like
    /// the extractor's output for comparison in round-trip checks.
    pub fn expected_labels(&self, artwork_id: &str) -> BTreeMap<String, Vec<String>> {
        let picks = self.picks(artwork_id);
        let mut expected: BTreeMap<String, Vec<String>> = self
            .vocabulary
            .facets
            .iter()
            .filter(|(_, def)| !def.open)
            .map(|(f, _)| (f.clone(), Vec::new()))
            .collect();
        for (facet, labels) in &picks.facet_labels {
            let mut sorted = labels.clone();
            sorted.sort();
            expected.insert(facet.clone(), sorted);
        }
        expected.insert("sentiment".to_string(), vec![picks.sentiment.as_str().to_string()]);
        expected
    }

    fn render_answers(&self, picks: &MockPicks) -> String {
        let j = |labels: &[String]| labels.join(", ");
        let f = &picks.facet_labels;
        format!(
            "1. Form: {}. Scale: {}.\n\
             2. Light effect: {}. Light type: {}. Purpose: {}.\n\
             3. Materials: {}.\n\
             4. Techniques: {}.\n\
             5. Color tone: {}. Palette: {}. Themes: {}. Sentiment: {}.\n\
             6. Figures: {}.\n\
             7. Movement: {}.\n\
             8. Time of day: {}. Season: {}.\n",
            j(&f["form"]),
            j(&f["scale"]),
            j(&f["light_effect"]),
            j(&f["light_type"]),
            j(&f["light_purpose"]),
            j(&f["material"]),
            j(&f["technique"]),
            j(&f["color_tone"]),
            picks.palette.join(", "),
            picks.themes.join(", "),
            picks.sentiment.as_str(),
            j(&f["figure_type"]),
            j(&f["movement_representation"]),
            j(&f["time_of_day"]),
            j(&f["season"]),
        )
    }
}

fn artwork_id_from_messages(messages: &[ChatMessage]) -> String {
    for msg in messages {
        for line in msg.text().lines() {
            if let Some(id) = line.strip_prefix("artwork_id: ") {
                return id.trim().to_string();
            }
        }
    }
    // still deterministic: fall back to a digest of the full conversation
    let all: String = messages.iter().map(|m| m.text()).collect();
    super::cache::digest_parts(&[&all])
}

impl ChatBackend for MockVisionBackend {
    fn chat(
        &self,
        _model_id: &str,
        messages: &[ChatMessage],
        _temperature: f64,
    ) -> Result<String, CallError> {
        let artwork_id = artwork_id_from_messages(messages);
        let picks = self.picks(&artwork_id);
        Ok(self.render_answers(&picks))
    }

    fn needs_images(&self) -> bool {
        false
    }
}

/// Text-synthesis mock: extracts the raw answers after the marker and emits
/// the structured JSON object via the rule-based extractor.
pub struct MockTextBackend {
    vocabulary: FacetVocabulary,
}

impl MockTextBackend {
    pub fn new(vocabulary: FacetVocabulary) -> Self {
        MockTextBackend { vocabulary }
    }
}

impl ChatBackend for MockTextBackend {
    fn chat(
        &self,
        _model_id: &str,
        messages: &[ChatMessage],
        _temperature: f64,
    ) -> Result<String, CallError> {
        let all: String = messages
            .iter()
            .map(|m| m.text())
            .collect::<Vec<_>>()
            .join("\n");
        let raw = all
            .split_once(SYNTH_RAW_MARKER)
            .map(|(_, rest)| rest)
            .unwrap_or(&all);
        let analysis = fallback_extract(raw, &self.vocabulary, "mock");
        let body = json!({
            "facets": analysis.facet_labels,
            "focus_text": analysis.focus_text,
            "emotional_themes": analysis.emotional_themes,
            "sentiment": analysis.sentiment.as_str(),
        });
        Ok(serde_json::to_string_pretty(&body).map_err(|e| CallError::Terminal(e.to_string()))?)
    }

    fn needs_images(&self) -> bool {
        false
    }
}
