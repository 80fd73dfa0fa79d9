//! Artwork corpus manifest: loading, validation, filtering, summaries.
//!
//! Manifests are CSV (header `id,artist,title,year,style,image_ref`) or
//! JSON-lines with the same field names. Unknown or approximate years are
//! encoded as an empty year field, never 0. Style labels are matched
//! case-sensitively after trimming; normalization belongs to extraction.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const YEAR_MIN: i32 = 1000;
pub const YEAR_MAX: i32 = 2100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtworkRecord {
    pub id: String,
    pub artist: String,
    pub title: String,
    pub year: Option<i32>,
    pub style: String,
    pub image_ref: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub records: Vec<ArtworkRecord>,
    pub source_note: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("manifest file not found: {0}")]
    MissingFile(String),
    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("row {row}: duplicate artwork id {id:?}")]
    DuplicateId { row: usize, id: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Optional predicates applied conjunctively by [`filter_corpus`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FilterSpec {
    pub artists: Option<Vec<String>>,
    pub styles: Option<Vec<String>>,
    pub year_range: Option<(i32, i32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub record_count: usize,
    pub artist_count: usize,
    pub style_count: usize,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub per_style_counts: BTreeMap<String, usize>,
}

fn validate_record(rec: &ArtworkRecord, row: usize) -> Result<(), CorpusError> {
    if rec.id.trim().is_empty() {
        return Err(CorpusError::MalformedRow {
            row,
            message: "field `id` is empty".into(),
        });
    }
    if rec.style.trim().is_empty() {
        return Err(CorpusError::MalformedRow {
            row,
            message: format!("field `style` is empty for id {:?}", rec.id),
        });
    }
    if let Some(y) = rec.year {
        if !(YEAR_MIN..=YEAR_MAX).contains(&y) {
            return Err(CorpusError::MalformedRow {
                row,
                message: format!("year {y} outside [{YEAR_MIN}, {YEAR_MAX}] for id {:?}", rec.id),
            });
        }
    }
    Ok(())
}

/// Loads a manifest from CSV or JSON-lines, chosen by file extension
/// (`.jsonl`/`.ndjson` for JSON-lines, anything else parsed as CSV).
pub fn load_manifest(path: &Path) -> Result<CorpusManifest, CorpusError> {
    if !path.exists() {
        return Err(CorpusError::MissingFile(path.display().to_string()));
    }
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let records = if matches!(ext, "jsonl" | "ndjson") {
        load_jsonl(path)?
    } else {
        load_csv(path)?
    };

    let mut seen = HashSet::new();
    for (i, rec) in records.iter().enumerate() {
        validate_record(rec, i + 1)?;
        if !seen.insert(rec.id.clone()) {
            return Err(CorpusError::DuplicateId {
                row: i + 1,
                id: rec.id.clone(),
            });
        }
    }

    Ok(CorpusManifest {
        records,
        source_note: path.display().to_string(),
    })
}

fn load_csv(path: &Path) -> Result<Vec<ArtworkRecord>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .map_err(|e| CorpusError::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?;
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?
        .clone();

    let known = ["id", "artist", "title", "year", "style", "image_ref"];
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| CorpusError::MalformedRow {
            row: row_no,
            message: e.to_string(),
        })?;
        let field = |name: &str| -> String {
            headers
                .iter()
                .position(|h| h == name)
                .and_then(|idx| row.get(idx))
                .unwrap_or("")
                .to_string()
        };
        let year_raw = field("year");
        let year = if year_raw.is_empty() {
            None
        } else {
            Some(year_raw.parse::<i32>().map_err(|_| CorpusError::MalformedRow {
                row: row_no,
                message: format!("field `year` is not an integer: {year_raw:?}"),
            })?)
        };
        let mut extra = BTreeMap::new();
        for (h, v) in headers.iter().zip(row.iter()) {
            if !known.contains(&h) && !v.is_empty() {
                extra.insert(h.to_string(), v.to_string());
            }
        }
        records.push(ArtworkRecord {
            id: field("id"),
            artist: field("artist"),
            title: field("title"),
            year,
            style: field("style"),
            image_ref: field("image_ref"),
            extra,
        });
    }
    Ok(records)
}

fn load_jsonl(path: &Path) -> Result<Vec<ArtworkRecord>, CorpusError> {
    let text = std::fs::read_to_string(path)?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ArtworkRecord =
            serde_json::from_str(line).map_err(|e| CorpusError::MalformedRow {
                row: i + 1,
                message: e.to_string(),
            })?;
        records.push(rec);
    }
    Ok(records)
}

/// Writes a manifest back out as CSV with the canonical header.
pub fn write_manifest_csv(manifest: &CorpusManifest, path: &Path) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CorpusError::Io(std::io::Error::other(e)))?;
    w.write_record(["id", "artist", "title", "year", "style", "image_ref"])
        .map_err(|e| CorpusError::Io(std::io::Error::other(e)))?;
    for rec in &manifest.records {
        let year = rec.year.map(|y| y.to_string()).unwrap_or_default();
        w.write_record([
            &rec.id,
            &rec.artist,
            &rec.title,
            &year,
            &rec.style,
            &rec.image_ref,
        ])
        .map_err(|e| CorpusError::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

/// Keeps records satisfying all provided predicates; order preserved.
/// Records with a missing year are excluded only when `year_range` is given.
pub fn filter_corpus(manifest: &CorpusManifest, spec: &FilterSpec) -> CorpusManifest {
    let records = manifest
        .records
        .iter()
        .filter(|rec| {
            if let Some(artists) = &spec.artists {
                if !artists.iter().any(|a| a.trim() == rec.artist.trim()) {
                    return false;
                }
            }
            if let Some(styles) = &spec.styles {
                if !styles.iter().any(|s| s.trim() == rec.style.trim()) {
                    return false;
                }
            }
            if let Some((lo, hi)) = spec.year_range {
                match rec.year {
                    Some(y) => {
                        if y < lo || y > hi {
                            return false;
                        }
                    }
                    None => return false,
                }
            }
            true
        })
        .cloned()
        .collect();
    CorpusManifest {
        records,
        source_note: manifest.source_note.clone(),
    }
}

pub fn corpus_summary(manifest: &CorpusManifest) -> CorpusSummary {
    let mut artists = HashSet::new();
    let mut per_style_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut year_min = None;
    let mut year_max = None;
    for rec in &manifest.records {
        artists.insert(rec.artist.as_str());
        *per_style_counts.entry(rec.style.clone()).or_insert(0) += 1;
        if let Some(y) = rec.year {
            year_min = Some(year_min.map_or(y, |m: i32| m.min(y)));
            year_max = Some(year_max.map_or(y, |m: i32| m.max(y)));
        }
    }
    CorpusSummary {
        record_count: manifest.records.len(),
        artist_count: artists.len(),
        style_count: per_style_counts.len(),
        year_min,
        year_max,
        per_style_counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(contents: &str, ext: &str) -> tempfile::TempPath {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f.into_temp_path()
    }

    fn fixture_five() -> CorpusManifest {
        let csv = "id,artist,title,year,style,image_ref\n\
                   a1,Picasso,Guernica Study,1937,Cubism,img/a1.png\n\
                   a2,Picasso,Violin,1912,Cubism,img/a2.png\n\
                   a3,Monet,Haystacks,1891,Impressionism,img/a3.png\n\
                   a4,Dali,Dream,1944,Surrealism,img/a4.png\n\
                   a5,Monet,Water Lilies,,Impressionism,img/a5.png\n";
        let path = write_temp(csv, ".csv");
        load_manifest(&path).unwrap()
    }

    #[test]
    fn empty_file_header_only() {
        let path = write_temp("id,artist,title,year,style,image_ref\n", ".csv");
        let m = load_manifest(&path).unwrap();
        assert!(m.records.is_empty());
    }

    #[test]
    fn five_row_fixture_in_file_order() {
        let m = fixture_five();
        assert_eq!(m.records.len(), 5);
        let ids: Vec<_> = m.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a1", "a2", "a3", "a4", "a5"]);
        assert_eq!(m.records[4].year, None);
    }

    #[test]
    fn duplicate_id_is_fatal() {
        let csv = "id,artist,title,year,style,image_ref\n\
                   a1,X,T,1900,S,i\na1,Y,U,1901,S,i\n";
        let path = write_temp(csv, ".csv");
        match load_manifest(&path) {
            Err(CorpusError::DuplicateId { row, id }) => {
                assert_eq!(row, 2);
                assert_eq!(id, "a1");
            }
            other => panic!("expected duplicate id error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_year_reports_row() {
        let csv = "id,artist,title,year,style,image_ref\na1,X,T,abcd,S,i\n";
        let path = write_temp(csv, ".csv");
        match load_manifest(&path) {
            Err(CorpusError::MalformedRow { row, message }) => {
                assert_eq!(row, 1);
                assert!(message.contains("year"));
            }
            other => panic!("expected malformed row, got {other:?}"),
        }
    }

    #[test]
    fn year_out_of_range_rejected() {
        let csv = "id,artist,title,year,style,image_ref\na1,X,T,0,S,i\n";
        let path = write_temp(csv, ".csv");
        assert!(matches!(
            load_manifest(&path),
            Err(CorpusError::MalformedRow { .. })
        ));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_manifest(Path::new("/no/such/manifest.csv")),
            Err(CorpusError::MissingFile(_))
        ));
    }

    #[test]
    fn jsonl_alternative() {
        let jsonl = r#"{"id":"a1","artist":"X","title":"T","year":1900,"style":"S","image_ref":"i"}
{"id":"a2","artist":"X","title":"U","year":null,"style":"S","image_ref":"i"}
"#;
        let path = write_temp(jsonl, ".jsonl");
        let m = load_manifest(&path).unwrap();
        assert_eq!(m.records.len(), 2);
        assert_eq!(m.records[1].year, None);
    }

    #[test]
    fn empty_filter_is_identity() {
        let m = fixture_five();
        let filtered = filter_corpus(&m, &FilterSpec::default());
        assert_eq!(filtered.records, m.records);
    }

    #[test]
    fn style_filter() {
        let m = fixture_five();
        let filtered = filter_corpus(
            &m,
            &FilterSpec {
                styles: Some(vec!["Cubism".into()]),
                ..Default::default()
            },
        );
        assert_eq!(filtered.records.len(), 2);
        assert!(filtered.records.iter().all(|r| r.style == "Cubism"));
    }

    #[test]
    fn year_range_excludes_undated() {
        let m = fixture_five();
        let filtered = filter_corpus(
            &m,
            &FilterSpec {
                year_range: Some((1860, 1930)),
                ..Default::default()
            },
        );
        let ids: Vec<_> = filtered.records.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a2", "a3"]);
    }

    #[test]
    fn summary_empty() {
        let m = CorpusManifest {
            records: vec![],
            source_note: String::new(),
        };
        let s = corpus_summary(&m);
        assert_eq!(s.artist_count, 0);
        assert_eq!(s.style_count, 0);
        assert_eq!(s.year_min, None);
        assert_eq!(s.year_max, None);
    }

    #[test]
    fn summary_fixture() {
        let s = corpus_summary(&fixture_five());
        assert_eq!(s.style_count, 3);
        assert_eq!(s.artist_count, 3);
        assert_eq!(s.year_min, Some(1891));
        assert_eq!(s.year_max, Some(1944));
        assert_eq!(s.per_style_counts.values().sum::<usize>(), 5);
    }

    #[test]
    fn csv_round_trip() {
        let m = fixture_five();
        let path = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        write_manifest_csv(&m, path.path()).unwrap();
        let reloaded = load_manifest(path.path()).unwrap();
        assert_eq!(reloaded.records, m.records);
    }
}
