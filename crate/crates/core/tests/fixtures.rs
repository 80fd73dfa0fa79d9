//! Checks over the shipped fixture corpora: manifest shape, summary counts,
//! and the mock round-trip across every fixture artwork.

use std::path::PathBuf;

use artlens_core::corpus::{corpus_summary, load_manifest};
use artlens_core::extraction::{default_vocabulary, fallback_extract};
use artlens_core::gateway::MockVisionBackend;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

#[test]
fn fixture_corpus_has_forty_artworks() {
    let manifest = load_manifest(&fixture("corpus_40.csv")).unwrap();
    let summary = corpus_summary(&manifest);
    assert_eq!(summary.record_count, 40);
    assert_eq!(summary.style_count, 6);
    assert_eq!(summary.artist_count, 8);
    let undated = manifest.records.iter().filter(|r| r.year.is_none()).count();
    assert_eq!(undated, 2);
}

#[test]
fn large_corpus_spans_full_style_and_artist_breadth() {
    // wide-breadth fixture: 34 styles across 23 artists
    let manifest = load_manifest(&fixture("corpus_large.csv")).unwrap();
    let summary = corpus_summary(&manifest);
    assert_eq!(summary.style_count, 34);
    assert_eq!(summary.artist_count, 23);
}

#[test]
fn style_descriptions_cover_every_fixture_style() {
    let manifest = load_manifest(&fixture("corpus_40.csv")).unwrap();
    let styles = artlens_core::evaluation::StyleDescriptionSet::from_file(
        &fixture("style_descriptions.json"),
    )
    .unwrap();
    for record in &manifest.records {
        assert!(
            styles.get(&record.style).is_some(),
            "no description for {}",
            record.style
        );
    }
}

#[test]
fn mock_round_trip_recovers_labels_for_all_fixture_artworks() {
    let vocab = default_vocabulary();
    let backend = MockVisionBackend::new(7, vocab.clone());
    let manifest = load_manifest(&fixture("corpus_40.csv")).unwrap();
    assert_eq!(manifest.records.len(), 40);
    for record in &manifest.records {
        let picks = backend.picks(&record.id);
        let raw = {
            use artlens_core::gateway::{ChatMessage, ContentPart};
            use artlens_core::gateway::ChatBackend as _;
            let messages = vec![
                ChatMessage {
                    role: "system",
                    parts: vec![ContentPart::Text(format!("artwork_id: {}", record.id))],
                },
                ChatMessage::user_text("questions"),
            ];
            backend.chat("mock-vision", &messages, 0.0).unwrap()
        };
        let analysis = fallback_extract(&raw, &vocab, &record.id);
        let expected = backend.expected_labels(&record.id);
        for (facet, labels) in &expected {
            assert_eq!(&analysis.facet_labels[facet], labels, "{}/{facet}", record.id);
        }
        let expected_themes: std::collections::BTreeSet<String> =
            picks.themes.into_iter().collect();
        assert_eq!(analysis.emotional_themes, expected_themes, "{}", record.id);
    }
}
