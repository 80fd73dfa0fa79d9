//! Property suites: cosine invariants, quantile oracle equivalence, pooled
//! aggregation equivalence, parser robustness and normalization idempotence.

use proptest::prelude::*;

use artlens_core::evaluation::{
    cosine_raw, five_number_summary, sbon_aggregate, table1_stats, FocusArea, SimilarityScore,
};
use artlens_core::extraction::{default_vocabulary, normalize_label, parse_structured};

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1000.0..1000.0f64, dim)
}

fn nonzero_vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    vector(dim).prop_filter("nonzero", |v| v.iter().any(|x| *x != 0.0))
}

proptest! {
    #[test]
    fn cosine_symmetry_and_bounds(
        (a, b) in (2usize..64).prop_flat_map(|d| (nonzero_vector(d), nonzero_vector(d)))
    ) {
        let ab = cosine_raw(&a, &b).unwrap();
        let ba = cosine_raw(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn cosine_self_and_scale_invariance(v in nonzero_vector(8), k in 0.001..1000.0f64) {
        let selfsim = cosine_raw(&v, &v).unwrap();
        prop_assert!((selfsim - 1.0).abs() <= 1e-12);
        let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
        let sim = cosine_raw(&v, &scaled).unwrap();
        prop_assert!((sim - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn quantiles_match_brute_force_oracle(values in proptest::collection::vec(-1.0..1.0f64, 1..500)) {
        // independent sort-and-interpolate oracle at positions p(n-1)
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let oracle = |p: f64| {
            let pos = p * (sorted.len() as f64 - 1.0);
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            let frac = pos - lo as f64;
            sorted[lo] + frac * (sorted[hi] - sorted[lo])
        };
        let s = five_number_summary(&values).unwrap();
        prop_assert_eq!(s.min, sorted[0]);
        prop_assert_eq!(s.q1, oracle(0.25));
        prop_assert_eq!(s.median, oracle(0.5));
        prop_assert_eq!(s.q3, oracle(0.75));
        prop_assert_eq!(s.max, sorted[sorted.len() - 1]);
    }

    #[test]
    fn sbon_equals_brute_force_pooling(
        per_group in proptest::collection::vec(0.0..1.0f64, 1..40),
        model_count in 1usize..5,
    ) {
        let mut scores = Vec::new();
        for m in 0..model_count {
            for focus in FocusArea::ALL {
                for (i, v) in per_group.iter().enumerate() {
                    scores.push(SimilarityScore {
                        model_id: format!("m{m}"),
                        focus,
                        artwork_id: format!("a{i}"),
                        style: "S".into(),
                        value: (v + m as f64 * 0.01).min(1.0),
                    });
                }
            }
        }
        let rows = sbon_aggregate(&scores).unwrap();
        prop_assert_eq!(rows.len(), 6);
        // brute force: pool per focus, summarize
        for row in &rows {
            let pooled: Vec<f64> = scores
                .iter()
                .filter(|s| s.focus == row.focus)
                .map(|s| s.value)
                .collect();
            let s = five_number_summary(&pooled).unwrap();
            prop_assert_eq!(row.min, s.min);
            prop_assert_eq!(row.q1, s.q1);
            prop_assert_eq!(row.median, s.median);
            prop_assert_eq!(row.q3, s.q3);
            prop_assert_eq!(row.max, s.max);
        }
        prop_assert!(rows.windows(2).all(|w| w[0].median >= w[1].median));
        // per-model rows exist for every (model, focus) pair
        let table = table1_stats(&scores).unwrap();
        prop_assert_eq!(table.len(), model_count * 6);
    }

    #[test]
    fn parse_structured_never_panics(text in ".*") {
        let vocab = default_vocabulary();
        let _ = parse_structured(&text, &vocab, "fuzz");
    }

    #[test]
    fn parse_structured_tolerates_fences_and_prose(payload in "[a-z ,{}\\[\\]\":0-9]*") {
        let vocab = default_vocabulary();
        let fenced = format!("Sure! Here you go:\n```json\n{payload}\n```\nHope that helps.");
        let _ = parse_structured(&fenced, &vocab, "fuzz");
    }

    #[test]
    fn normalize_label_is_idempotent(raw in ".{0,60}") {
        let vocab = default_vocabulary();
        for facet in vocab.facet_names() {
            let once = normalize_label(&raw, facet, &vocab);
            let twice = normalize_label(&once, facet, &vocab);
            prop_assert_eq!(once, twice);
        }
    }
}
