//! Second-stage synthesis: prompt a text model to turn the raw eight-answer
//! analysis into one JSON object in the controlled taxonomy.

use crate::evaluation::FocusArea;
use crate::gateway::{ChatGateway, ChatMessage, GatewayError, VisionResponse, SYNTH_RAW_MARKER};

use super::vocabulary::FacetVocabulary;

/// Builds the synthesis instruction for one raw response. The instruction
/// enumerates the allowed labels per facet so the model stays inside the
/// vocabulary; everything after the raw-text marker is the material to
/// synthesize.
pub fn synthesis_prompt(raw_text: &str, vocabulary: &FacetVocabulary) -> String {
    let mut prompt = String::from(
        "Convert the raw artwork analysis below into a single JSON object with \
         exactly these keys:\n\
         - \"facets\": object mapping each facet name to an array of labels \
         chosen only from the allowed lists below (use [] when nothing applies),\n\
         - \"focus_text\": object with keys form_scale, colors, light_contrast, \
         movement, material, techniques; each a short prose synthesis of the \
         matching answers,\n\
         - \"emotional_themes\": array of lowercase single-word themes,\n\
         - \"sentiment\": one of \"Positive\", \"Neutral\", \"Negative\".\n\
         Respond with the JSON object only.\n\nAllowed labels:\n",
    );
    for (facet, def) in &vocabulary.facets {
        if def.open {
            prompt.push_str(&format!("- {facet}: any short descriptive values\n"));
        } else {
            prompt.push_str(&format!("- {facet}: {}\n", def.labels.join(", ")));
        }
    }
    let _ = FocusArea::ALL; // focus keys above stay in sync with FocusArea::key()
    prompt.push('\n');
    prompt.push_str(SYNTH_RAW_MARKER);
    prompt.push_str(raw_text);
    prompt
}

/// Runs the synthesis stage for one raw vision response, cached via the
/// gateway. Returns the model's JSON text wrapped in the usual response
/// envelope; empty output is a terminal per-artwork failure upstream.
pub fn synthesize(
    raw: &VisionResponse,
    gateway: &ChatGateway,
    vocabulary: &FacetVocabulary,
) -> Result<VisionResponse, GatewayError> {
    let prompt = synthesis_prompt(&raw.raw_text, vocabulary);
    let messages = vec![ChatMessage::user_text(prompt.clone())];
    gateway.complete_cached(&raw.artwork_id, &prompt, &messages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::vocabulary::default_vocabulary;

    #[test]
    fn prompt_lists_every_facet_and_carries_marker() {
        let v = default_vocabulary();
        let p = synthesis_prompt("1. answers", &v);
        for facet in v.facet_names() {
            assert!(p.contains(&format!("- {facet}:")), "missing {facet}");
        }
        assert!(p.contains(SYNTH_RAW_MARKER));
        assert!(p.ends_with("1. answers"));
    }

    #[test]
    fn prompt_is_deterministic() {
        let v = default_vocabulary();
        assert_eq!(synthesis_prompt("x", &v), synthesis_prompt("x", &v));
    }
}
