//! Emotional themes and their sentiment mapping. The shipped list carries
//! 24 themes in a data file; unknown themes count as Neutral.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

const DEFAULT_THEMES_JSON: &str = include_str!("../data/themes.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sentiment {
    Positive,
    Neutral,
    Negative,
}

impl Sentiment {
    /// Tie-break order: Positive > Neutral > Negative.
    pub const ORDER: [Sentiment; 3] = [Sentiment::Positive, Sentiment::Neutral, Sentiment::Negative];

    pub fn as_str(self) -> &'static str {
        match self {
            Sentiment::Positive => "Positive",
            Sentiment::Neutral => "Neutral",
            Sentiment::Negative => "Negative",
        }
    }

    pub fn parse(s: &str) -> Option<Sentiment> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Some(Sentiment::Positive),
            "neutral" => Some(Sentiment::Neutral),
            "negative" => Some(Sentiment::Negative),
            _ => None,
        }
    }
}

pub type ThemeMapping = BTreeMap<String, Sentiment>;

pub fn default_theme_mapping() -> ThemeMapping {
    serde_json::from_str(DEFAULT_THEMES_JSON).expect("builtin theme mapping parses")
}

pub fn theme_mapping_from_file(path: &Path) -> Result<ThemeMapping, std::io::Error> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(std::io::Error::other)
}

/// Majority sentiment over the mapped themes; unknown themes map Neutral;
/// ties resolved by the fixed order Positive > Neutral > Negative.
pub fn sentiment_of_themes(themes: &BTreeSet<String>, mapping: &ThemeMapping) -> Sentiment {
    if themes.is_empty() {
        return Sentiment::Neutral;
    }
    let mut counts: BTreeMap<Sentiment, usize> = BTreeMap::new();
    for theme in themes {
        let s = mapping
            .get(theme.trim().to_ascii_lowercase().as_str())
            .copied()
            .unwrap_or(Sentiment::Neutral);
        *counts.entry(s).or_insert(0) += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    Sentiment::ORDER
        .into_iter()
        .find(|s| counts.get(s).copied().unwrap_or(0) == best)
        .unwrap_or(Sentiment::Neutral)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn shipped_mapping_has_24_themes() {
        let m = default_theme_mapping();
        assert_eq!(m.len(), 24);
        assert_eq!(m["serenity"], Sentiment::Positive);
        assert_eq!(m["melancholy"], Sentiment::Negative);
    }

    #[test]
    fn empty_is_neutral() {
        assert_eq!(
            sentiment_of_themes(&BTreeSet::new(), &default_theme_mapping()),
            Sentiment::Neutral
        );
    }

    #[test]
    fn majority_positive() {
        let m = default_theme_mapping();
        assert_eq!(
            sentiment_of_themes(&set(&["serenity", "joy"]), &m),
            Sentiment::Positive
        );
    }

    #[test]
    fn tie_prefers_positive() {
        let m = default_theme_mapping();
        assert_eq!(
            sentiment_of_themes(&set(&["joy", "grief"]), &m),
            Sentiment::Positive
        );
        assert_eq!(
            sentiment_of_themes(&set(&["mystery", "grief"]), &m),
            Sentiment::Neutral
        );
    }

    #[test]
    fn unknown_theme_is_neutral() {
        let m = default_theme_mapping();
        assert_eq!(
            sentiment_of_themes(&set(&["zeitgeist"]), &m),
            Sentiment::Neutral
        );
    }
}
