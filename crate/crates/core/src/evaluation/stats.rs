//! Five-number summaries and Table-1-style grouping.
//!
//! Quantiles use linear interpolation between order statistics at positions
//! p·(n−1) (the "type 7" convention). This choice is pinned by golden tests.

use std::collections::BTreeMap;

use super::{EvalError, FocusArea, SimilarityScore, SimilarityStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiveNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn five_number_summary(values: &[f64]) -> Result<FiveNumberSummary, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(FiveNumberSummary {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

fn stats_row(group_model: &str, focus: FocusArea, values: &[f64]) -> Result<SimilarityStats, EvalError> {
    let s = five_number_summary(values)?;
    Ok(SimilarityStats {
        group_model: group_model.to_string(),
        focus,
        min: s.min,
        q1: s.q1,
        median: s.median,
        q3: s.q3,
        max: s.max,
    })
}

/// One row per (model, focus) group. Models appear in first-appearance order
/// of the score list; focus areas in fixed order F/S, CLR, L/C, MVT, MAT, TCH.
pub fn table1_stats(scores: &[SimilarityScore]) -> Result<Vec<SimilarityStats>, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut model_order: Vec<&str> = Vec::new();
    let mut grouped: BTreeMap<(String, FocusArea), Vec<f64>> = BTreeMap::new();
    for s in scores {
        if !model_order.contains(&s.model_id.as_str()) {
            model_order.push(&s.model_id);
        }
        grouped
            .entry((s.model_id.clone(), s.focus))
            .or_default()
            .push(s.value);
    }
    let mut rows = Vec::new();
    for model in model_order {
        for focus in FocusArea::ALL {
            if let Some(values) = grouped.get(&(model.to_string(), focus)) {
                rows.push(stats_row(model, focus, values)?);
            }
        }
    }
    Ok(rows)
}

/// Pools all models' scores per focus, summarizes, and sorts rows by median
/// descending; ties broken by fixed focus order.
pub fn sbon_aggregate(scores: &[SimilarityScore]) -> Result<Vec<SimilarityStats>, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut pooled: BTreeMap<FocusArea, Vec<f64>> = BTreeMap::new();
    for s in scores {
        pooled.entry(s.focus).or_default().push(s.value);
    }
    let mut rows = Vec::new();
    for focus in FocusArea::ALL {
        if let Some(values) = pooled.get(&focus) {
            rows.push(stats_row("SBON", focus, values)?);
        }
    }
    let focus_rank =
        |f: FocusArea| FocusArea::ALL.iter().position(|x| *x == f).unwrap();
    rows.sort_by(|a, b| {
        b.median
            .partial_cmp(&a.median)
            .unwrap()
            .then_with(|| focus_rank(a.focus).cmp(&focus_rank(b.focus)))
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_on_order_statistics() {
        let s = five_number_summary(&[0.2, 0.4, 0.6, 0.8, 1.0]).unwrap();
        assert_eq!(
            (s.min, s.q1, s.median, s.q3, s.max),
            (0.2, 0.4, 0.6, 0.8, 1.0)
        );
    }

    #[test]
    fn summary_singleton_degenerate() {
        let s = five_number_summary(&[0.37]).unwrap();
        assert!([s.min, s.q1, s.median, s.q3, s.max].iter().all(|v| *v == 0.37));
    }

    #[test]
    fn summary_interpolates() {
        // n=4: q1 at pos 0.75 -> 1 + 0.75*(2-1) = 1.75
        let s = five_number_summary(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q3, 3.25);
    }

    #[test]
    fn summary_rejects_empty() {
        assert!(matches!(five_number_summary(&[]), Err(EvalError::EmptyInput)));
    }

    fn score(model: &str, focus: FocusArea, v: f64) -> SimilarityScore {
        SimilarityScore {
            model_id: model.into(),
            focus,
            artwork_id: "a".into(),
            style: "s".into(),
            value: v,
        }
    }

    #[test]
    fn table1_respects_model_then_focus_order() {
        let mut scores = Vec::new();
        for model in ["zeta", "alpha"] {
            for focus in FocusArea::ALL {
                scores.push(score(model, focus, 0.5));
                scores.push(score(model, focus, 0.7));
            }
        }
        let rows = table1_stats(&scores).unwrap();
        assert_eq!(rows.len(), 12);
        assert_eq!(rows[0].group_model, "zeta");
        assert_eq!(rows[6].group_model, "alpha");
        let focuses: Vec<_> = rows[..6].iter().map(|r| r.focus).collect();
        assert_eq!(focuses, FocusArea::ALL.to_vec());
    }

    #[test]
    fn sbon_sorts_by_median_descending() {
        // Per-focus medians match the published SBON ordering fixture:
        // TCH 0.61, MVT 0.57, MAT 0.56, F/S 0.51, CLR 0.48, L/C 0.46.
        let medians = [
            (FocusArea::Techniques, 0.61),
            (FocusArea::Movement, 0.57),
            (FocusArea::Material, 0.56),
            (FocusArea::FormScale, 0.51),
            (FocusArea::Colors, 0.48),
            (FocusArea::LightContrast, 0.46),
        ];
        let mut scores = Vec::new();
        for (focus, med) in medians {
            for model in ["m1", "m2"] {
                scores.push(score(model, focus, med - 0.05));
                scores.push(score(model, focus, med));
                scores.push(score(model, focus, med + 0.05));
            }
        }
        let rows = sbon_aggregate(&scores).unwrap();
        let codes: Vec<_> = rows.iter().map(|r| r.focus.code()).collect();
        assert_eq!(codes, ["TCH", "MVT", "MAT", "F/S", "CLR", "L/C"]);
        assert!((rows[0].median - 0.61).abs() < 1e-12);
    }

    #[test]
    fn sbon_single_model_is_resorted_table1() {
        let mut scores = Vec::new();
        for (i, focus) in FocusArea::ALL.into_iter().enumerate() {
            scores.push(score("only", focus, 0.1 * (i + 1) as f64));
        }
        let sbon = sbon_aggregate(&scores).unwrap();
        let table = table1_stats(&scores).unwrap();
        for row in &sbon {
            let t = table.iter().find(|r| r.focus == row.focus).unwrap();
            assert_eq!((row.min, row.median, row.max), (t.min, t.median, t.max));
        }
        // descending median means reversed focus order here
        assert_eq!(sbon[0].focus, FocusArea::Techniques);
        assert_eq!(sbon[5].focus, FocusArea::FormScale);
    }
}
