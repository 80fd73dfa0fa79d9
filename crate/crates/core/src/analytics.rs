//! Temporal and cross-sectional aggregation of structured analyses into the
//! distribution datasets behind the figure families: binned label counts,
//! tone-percentage box plots, and style × label crosstabs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusManifest;
use crate::evaluation::five_number_summary;
use crate::extraction::StructuredAnalysis;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("unknown facet {0:?}")]
    UnknownFacet(String),
    #[error("bin width must be >= 1")]
    BadBinWidth,
    #[error("period width must be >= 1")]
    BadPeriodWidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSeries {
    pub facet: String,
    /// Disjoint ascending bins, inclusive `[start, end]` years.
    pub bins: Vec<(i32, i32)>,
    pub counts: BTreeMap<String, Vec<u64>>,
    pub cumulative: bool,
    /// (artwork, label) incidences excluded because the artwork is undated.
    pub undated_incidences: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub group: String,
    pub tone: String,
    pub period_start: i32,
    pub period_end: i32,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

fn year_of<'a>(corpus: &'a CorpusManifest) -> BTreeMap<&'a str, Option<i32>> {
    corpus
        .records
        .iter()
        .map(|r| (r.id.as_str(), r.year))
        .collect()
}

fn check_facet(analyses: &[StructuredAnalysis], facet: &str) -> Result<(), AnalyticsError> {
    if let Some(first) = analyses.first() {
        if !first.facet_labels.contains_key(facet) {
            return Err(AnalyticsError::UnknownFacet(facet.to_string()));
        }
    }
    Ok(())
}

/// Bins (artwork, label) incidences by year; each pair contributes 1 to its
/// bin. Bins align to multiples of the width. Undated artworks are excluded
/// and counted in `undated_incidences`.
pub fn facet_distribution(
    analyses: &[StructuredAnalysis],
    corpus: &CorpusManifest,
    facet: &str,
    bin_width_years: u32,
    cumulative: bool,
) -> Result<DistributionSeries, AnalyticsError> {
    if bin_width_years < 1 {
        return Err(AnalyticsError::BadBinWidth);
    }
    check_facet(analyses, facet)?;
    let years = year_of(corpus);
    let width = bin_width_years as i32;

    let mut dated: Vec<(i32, &str)> = Vec::new();
    let mut undated: u64 = 0;
    for analysis in analyses {
        let year = years.get(analysis.artwork_id.as_str()).copied().flatten();
        let labels = analysis.facet_labels.get(facet).map(Vec::as_slice).unwrap_or(&[]);
        match year {
            Some(y) => dated.extend(labels.iter().map(|l| (y, l.as_str()))),
            None => undated += labels.len() as u64,
        }
    }

    let mut series = DistributionSeries {
        facet: facet.to_string(),
        bins: Vec::new(),
        counts: BTreeMap::new(),
        cumulative,
        undated_incidences: undated,
    };
    if dated.is_empty() {
        return Ok(series);
    }

    let floor_bin = |y: i32| y.div_euclid(width) * width;
    let min_bin = floor_bin(dated.iter().map(|(y, _)| *y).min().unwrap());
    let max_bin = floor_bin(dated.iter().map(|(y, _)| *y).max().unwrap());
    let mut start = min_bin;
    while start <= max_bin {
        series.bins.push((start, start + width - 1));
        start += width;
    }
    let n_bins = series.bins.len();
    for (y, label) in dated {
        let idx = ((floor_bin(y) - min_bin) / width) as usize;
        series
            .counts
            .entry(label.to_string())
            .or_insert_with(|| vec![0; n_bins])[idx] += 1;
    }
    if cumulative {
        for vec in series.counts.values_mut() {
            for i in 1..vec.len() {
                vec[i] += vec[i - 1];
            }
        }
    }
    Ok(series)
}

/// Per artwork, tone percentage = label multiplicity / total tone labels.
/// Box stats per (tone, period); artworks with zero tone labels or no year
/// are skipped and counted in the returned remainder.
pub fn tone_percentage_boxplots(
    analyses: &[StructuredAnalysis],
    corpus: &CorpusManifest,
    period_width_years: u32,
) -> Result<(Vec<BoxplotStats>, u64), AnalyticsError> {
    if period_width_years < 1 {
        return Err(AnalyticsError::BadPeriodWidth);
    }
    let years = year_of(corpus);
    let width = period_width_years as i32;
    let mut groups: BTreeMap<(String, i32), Vec<f64>> = BTreeMap::new();
    let mut skipped: u64 = 0;
    for analysis in analyses {
        let tones = analysis
            .facet_labels
            .get("color_tone")
            .map(Vec::as_slice)
            .unwrap_or(&[]);
        let year = years.get(analysis.artwork_id.as_str()).copied().flatten();
        let (Some(y), false) = (year, tones.is_empty()) else {
            skipped += 1;
            continue;
        };
        let period = y.div_euclid(width) * width;
        let total = tones.len() as f64;
        let mut multiplicity: BTreeMap<&str, usize> = BTreeMap::new();
        for t in tones {
            *multiplicity.entry(t.as_str()).or_insert(0) += 1;
        }
        for (tone, count) in multiplicity {
            groups
                .entry((tone.to_string(), period))
                .or_default()
                .push(100.0 * count as f64 / total);
        }
    }
    let mut stats = Vec::new();
    for ((tone, period), values) in groups {
        let s = five_number_summary(&values).expect("group is non-empty");
        stats.push(BoxplotStats {
            group: format!("{tone}|{period}"),
            tone,
            period_start: period,
            period_end: period + width - 1,
            min: s.min,
            q1: s.q1,
            median: s.median,
            q3: s.q3,
            max: s.max,
        });
    }
    Ok((stats, skipped))
}

/// Label counts per style for the `top_k` styles by artwork count
/// (ties broken alphabetically), without temporal binning.
pub fn style_facet_crosstab(
    analyses: &[StructuredAnalysis],
    corpus: &CorpusManifest,
    facet: &str,
    top_k: usize,
) -> Result<BTreeMap<String, BTreeMap<String, u64>>, AnalyticsError> {
    assert!(top_k >= 1);
    check_facet(analyses, facet)?;
    let style_of: BTreeMap<&str, &str> = corpus
        .records
        .iter()
        .map(|r| (r.id.as_str(), r.style.as_str()))
        .collect();

    let mut style_artworks: BTreeMap<&str, u64> = BTreeMap::new();
    for analysis in analyses {
        if let Some(style) = style_of.get(analysis.artwork_id.as_str()) {
            *style_artworks.entry(style).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, u64)> = style_artworks.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let kept: Vec<&str> = ranked.iter().take(top_k).map(|(s, _)| *s).collect();

    let mut table: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for analysis in analyses {
        let Some(style) = style_of.get(analysis.artwork_id.as_str()) else {
            continue;
        };
        if !kept.contains(style) {
            continue;
        }
        let cell = table.entry(style.to_string()).or_default();
        for label in analysis.facet_labels.get(facet).map(Vec::as_slice).unwrap_or(&[]) {
            *cell.entry(label.clone()).or_insert(0) += 1;
        }
    }
    Ok(table)
}
