//! Deterministic CSV/JSON dataset writers. Stable file names, stable row
//! ordering, fixed float formatting, so a warm-cache rerun reproduces the
//! run directory byte for byte.

use std::io::Write;
use std::path::Path;

use crate::analytics::{BoxplotStats, DistributionSeries};
use crate::evaluation::{SimilarityScore, SimilarityStats, TreemapNode};

fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

fn write_atomic(path: &Path, body: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(body)?;
    }
    std::fs::rename(&tmp, path)
}

/// Long format: `bin_start,bin_end,label,count`.
pub fn write_distribution_csv(path: &Path, series: &DistributionSeries) -> std::io::Result<()> {
    let mut out = String::from("bin_start,bin_end,label,count\n");
    for (label, counts) in &series.counts {
        for ((start, end), count) in series.bins.iter().zip(counts) {
            out.push_str(&format!("{start},{end},{},{count}\n", csv_quote(label)));
        }
    }
    write_atomic(path, out.as_bytes())
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// `model_id,focus,artwork_id,style,value`.
pub fn write_scores_csv(path: &Path, scores: &[SimilarityScore]) -> std::io::Result<()> {
    let mut out = String::from("model_id,focus,artwork_id,style,value\n");
    for s in scores {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_quote(&s.model_id),
            s.focus.code(),
            csv_quote(&s.artwork_id),
            csv_quote(&s.style),
            fmt6(s.value)
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// `group_model,focus,min,q1,median,q3,max`; SBON rows use group_model=SBON.
pub fn write_stats_csv(path: &Path, rows: &[SimilarityStats]) -> std::io::Result<()> {
    let mut out = String::from("group_model,focus,min,q1,median,q3,max\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_quote(&r.group_model),
            r.focus.code(),
            fmt6(r.min),
            fmt6(r.q1),
            fmt6(r.median),
            fmt6(r.q3),
            fmt6(r.max)
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// `period_start,period_end,tone,min,q1,median,q3,max`.
pub fn write_boxplots_csv(path: &Path, rows: &[BoxplotStats]) -> std::io::Result<()> {
    let mut out = String::from("period_start,period_end,tone,min,q1,median,q3,max\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.period_start,
            r.period_end,
            csv_quote(&r.tone),
            fmt6(r.min),
            fmt6(r.q1),
            fmt6(r.median),
            fmt6(r.q3),
            fmt6(r.max)
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// `style,label,count`.
pub fn write_crosstab_csv(
    path: &Path,
    table: &std::collections::BTreeMap<String, std::collections::BTreeMap<String, u64>>,
) -> std::io::Result<()> {
    let mut out = String::from("style,label,count\n");
    for (style, cells) in table {
        for (label, count) in cells {
            out.push_str(&format!("{},{},{count}\n", csv_quote(style), csv_quote(label)));
        }
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_treemap_json(path: &Path, root: &TreemapNode) -> std::io::Result<()> {
    let mut body = serde_json::to_vec_pretty(root)?;
    body.push(b'\n');
    write_atomic(path, &body)
}

pub fn write_json_pretty<T: serde::Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut body = serde_json::to_vec_pretty(value)?;
    body.push(b'\n');
    write_atomic(path, &body)
}

/// One JSON object per line.
pub fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) -> std::io::Result<()> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.push(b'\n');
    }
    write_atomic(path, &out)
}

pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> std::io::Result<Vec<T>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(std::io::Error::other))
        .collect()
}
