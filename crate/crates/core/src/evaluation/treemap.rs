//! Treemap datasets: cumulative cosine scores nested by a configurable
//! hierarchy (model/style/focus/artist), emitted as JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SimilarityScore;
use crate::corpus::CorpusManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreemapKey {
    Model,
    Style,
    Focus,
    Artist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreemapNode {
    pub name: String,
    /// Cumulative sum of cosine scores under this node.
    pub value: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TreemapNode>,
}

fn key_of(score: &SimilarityScore, key: TreemapKey, artist_of: &BTreeMap<&str, &str>) -> String {
    match key {
        TreemapKey::Model => score.model_id.clone(),
        TreemapKey::Style => score.style.clone(),
        TreemapKey::Focus => score.focus.code().to_string(),
        TreemapKey::Artist => artist_of
            .get(score.artwork_id.as_str())
            .copied()
            .unwrap_or("(unknown)")
            .to_string(),
    }
}

fn build(
    scores: &[&SimilarityScore],
    hierarchy: &[TreemapKey],
    artist_of: &BTreeMap<&str, &str>,
    name: String,
) -> TreemapNode {
    let value = scores.iter().map(|s| s.value).sum();
    let children = match hierarchy.split_first() {
        None => Vec::new(),
        Some((key, rest)) => {
            let mut groups: BTreeMap<String, Vec<&SimilarityScore>> = BTreeMap::new();
            for s in scores {
                groups.entry(key_of(s, *key, artist_of)).or_default().push(s);
            }
            groups
                .into_iter()
                .map(|(name, group)| build(&group, rest, artist_of, name))
                .collect()
        }
    };
    TreemapNode { name, value, children }
}

/// Builds the nested cumulative-score tree for one hierarchy. Children are
/// sorted by name; values are sums of the leaf scores beneath them.
pub fn treemap_by_hierarchy(
    scores: &[SimilarityScore],
    corpus: &CorpusManifest,
    hierarchy: &[TreemapKey],
) -> TreemapNode {
    let artist_of: BTreeMap<&str, &str> = corpus
        .records
        .iter()
        .map(|r| (r.id.as_str(), r.artist.as_str()))
        .collect();
    let refs: Vec<&SimilarityScore> = scores.iter().collect();
    build(&refs, hierarchy, &artist_of, "all".to_string())
}
