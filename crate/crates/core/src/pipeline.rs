//! Stage orchestration: wires the corpus, gateway, extraction, analytics,
//! evaluation and reporting modules into a resumable run directory.
//!
//! Each stage writes its artifacts under `runs/<run_id>/` and reloads them on
//! the next invocation, so `evaluate` after a finished `analyze` reuses every
//! cached response instead of re-calling providers. Run directories are
//! append-only: a fresh `run` picks the next unused id.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::analytics::{facet_distribution, style_facet_crosstab, tone_percentage_boxplots};
use crate::config::RunConfig;
use crate::corpus::{corpus_summary, load_manifest, CorpusManifest};
use crate::evaluation::{
    embed_corpus, sbon_aggregate, table1_stats, treemap_by_hierarchy, CorpusScores, Embedder,
    MockEmbedBackend, SimilarityStats, StyleDescriptionSet, TreemapKey,
};
use crate::extraction::{
    default_vocabulary, fallback_extract, parse_structured, synthesize, FacetVocabulary,
    StructuredAnalysis,
};
use crate::gateway::{
    analyze_batch, digest_parts, BatchOutcome, ChatBackend, ChatGateway, Clock, EmbedBackend,
    HttpChatBackend, HttpEmbedBackend, MockTextBackend, MockVisionBackend, SimClock, SystemClock,
    Timestamps, VisionResponse,
};
use crate::inquiry::{default_inquiry, InquirySet};
use crate::reporting::{
    bar_svg, boxplot_svg, stacked_area_svg, treemap_svg, write_boxplots_csv, write_crosstab_csv,
    write_distribution_csv, write_json_pretty, write_jsonl, write_scores_csv, write_stats_csv,
    write_treemap_json, RunManifest, StageStatus,
};

/// Timestamp pinned in mock runs so rerun artifacts stay byte-identical.
pub const MOCK_TIMESTAMP: &str = "1970-01-01T00:00:00+00:00";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{0}")]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error("{0}")]
    Vocabulary(#[from] crate::extraction::VocabularyError),
    #[error("{0}")]
    Inquiry(#[from] crate::inquiry::InquiryError),
    #[error("{0}")]
    Eval(#[from] crate::evaluation::EvalError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Fatal(String),
}

/// CLI-level overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    pub run_dir: Option<PathBuf>,
    pub seed: u64,
    pub mock: bool,
    pub bin_width: Option<u32>,
}

pub struct Pipeline {
    pub config: RunConfig,
    pub run_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub seed: u64,
    pub mock: bool,
    clock: Arc<dyn Clock>,
    timestamps: Timestamps,
    vocabulary: FacetVocabulary,
    inquiry: InquirySet,
}

/// First 8 bytes of a stable digest, as a per-model seed offset so mock
/// embedding providers with different ids disagree.
fn seed_for_model(seed: u64, model_id: &str) -> u64 {
    let hex = digest_parts(&["model-seed", model_id]);
    let word = u64::from_str_radix(&hex[..16], 16).expect("hex digest");
    seed ^ word
}

fn next_run_id(base: &Path) -> String {
    for i in 1..10_000 {
        let id = format!("run-{i:04}");
        if !base.join(&id).exists() {
            return id;
        }
    }
    panic!("run id space exhausted under {}", base.display());
}

impl Pipeline {
    pub fn new(mut config: RunConfig, options: &PipelineOptions) -> Result<Pipeline, PipelineError> {
        if let Some(w) = options.bin_width {
            if w < 1 {
                return Err(PipelineError::Fatal("--bin-width must be >= 1".into()));
            }
            config.analytics.bin_width = w;
        }
        let run_dir = match &options.run_dir {
            Some(dir) => dir.clone(),
            None => {
                let base = config.output.run_dir.clone();
                std::fs::create_dir_all(&base)?;
                base.join(next_run_id(&base))
            }
        };
        std::fs::create_dir_all(&run_dir)?;
        let cache_dir = config
            .output
            .cache_dir
            .clone()
            .unwrap_or_else(|| config.output.run_dir.join("cache"));
        std::fs::create_dir_all(&cache_dir)?;

        let vocabulary = match &config.vocabulary_file {
            Some(path) => FacetVocabulary::from_file(path)?,
            None => default_vocabulary(),
        };
        let inquiry = match &config.inquiry_file {
            Some(path) => InquirySet::from_file(path)?,
            None => default_inquiry(),
        };
        let (clock, timestamps): (Arc<dyn Clock>, Timestamps) = if options.mock {
            (Arc::new(SimClock::new()), Timestamps::Fixed(MOCK_TIMESTAMP.to_string()))
        } else {
            (Arc::new(SystemClock::new()), Timestamps::System)
        };
        Ok(Pipeline {
            config,
            run_dir,
            cache_dir,
            seed: options.seed,
            mock: options.mock,
            clock,
            timestamps,
            vocabulary,
            inquiry,
        })
    }

    pub fn run_id(&self) -> String {
        self.run_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".to_string())
    }

    fn vision_backend(&self) -> Arc<dyn ChatBackend> {
        if self.mock {
            Arc::new(MockVisionBackend::new(self.seed, self.vocabulary.clone()))
        } else {
            let c = &self.config.providers.vision;
            Arc::new(HttpChatBackend::new(&c.endpoint_url, &c.auth_env_var_or_default()))
        }
    }

    fn synth_backend(&self, config: &crate::gateway::ProviderConfig) -> Arc<dyn ChatBackend> {
        if self.mock {
            Arc::new(MockTextBackend::new(self.vocabulary.clone()))
        } else {
            Arc::new(HttpChatBackend::new(&config.endpoint_url, &config.auth_env_var_or_default()))
        }
    }

    fn embed_backend(&self, config: &crate::gateway::ProviderConfig) -> Arc<dyn EmbedBackend> {
        if self.mock {
            Arc::new(MockEmbedBackend::new(seed_for_model(self.seed, &config.model_id), 64))
        } else {
            Arc::new(HttpEmbedBackend::new(&config.endpoint_url, &config.auth_env_var_or_default()))
        }
    }

    fn vision_gateway(&self) -> ChatGateway {
        ChatGateway::new(
            self.config.providers.vision.clone(),
            self.vision_backend(),
            &self.cache_dir,
            self.clock.clone(),
            self.timestamps.clone(),
        )
    }

    // ---- stages ------------------------------------------------------

    /// Loads and validates the corpus manifest, writing the normalized
    /// JSON-lines copy plus a summary into the run directory.
    pub fn ingest(&self, manifest_path: Option<&Path>) -> Result<CorpusManifest, PipelineError> {
        let path = manifest_path.unwrap_or(&self.config.corpus);
        let manifest = load_manifest(path)?;
        write_jsonl(&self.run_dir.join("corpus.jsonl"), &manifest.records)?;
        write_json_pretty(&self.run_dir.join("corpus_summary.json"), &corpus_summary(&manifest))?;
        Ok(manifest)
    }

    fn load_or_ingest(&self) -> Result<CorpusManifest, PipelineError> {
        let path = self.run_dir.join("corpus.jsonl");
        if path.exists() {
            let records = crate::reporting::read_jsonl(&path)?;
            return Ok(CorpusManifest {
                records,
                source_note: path.display().to_string(),
            });
        }
        self.ingest(None)
    }

    /// First LLM pass: one eight-question vision call per artwork.
    pub fn analyze(&self) -> Result<Vec<BatchOutcome<VisionResponse>>, PipelineError> {
        let corpus = self.load_or_ingest()?;
        let gateway = self.vision_gateway();
        let outcomes = analyze_batch(&gateway, &corpus.records, &self.inquiry);
        write_jsonl(&self.run_dir.join("responses.jsonl"), &outcomes)?;
        Ok(outcomes)
    }

    fn load_or_analyze(&self) -> Result<Vec<BatchOutcome<VisionResponse>>, PipelineError> {
        let path = self.run_dir.join("responses.jsonl");
        if path.exists() {
            return Ok(crate::reporting::read_jsonl(&path)?);
        }
        self.analyze()
    }

    /// Second pass: structure each raw response. With a synthesis provider
    /// the text model emits JSON which is parsed tolerantly; otherwise (or on
    /// a parse failure) the deterministic rule-based extractor runs on the
    /// raw answers.
    pub fn synthesize(&self) -> Result<Vec<BatchOutcome<StructuredAnalysis>>, PipelineError> {
        let outcomes = self.load_or_analyze()?;
        let synth_gateway = self.config.providers.synth.as_ref().map(|c| {
            ChatGateway::new(
                c.clone(),
                self.synth_backend(c),
                &self.cache_dir,
                self.clock.clone(),
                self.timestamps.clone(),
            )
        });

        let mut structured: Vec<BatchOutcome<StructuredAnalysis>> = Vec::new();
        for outcome in &outcomes {
            let result = match outcome.ok() {
                None => crate::gateway::BatchResult::Failed {
                    reason: "no raw analysis".to_string(),
                },
                Some(raw) => {
                    let mut analysis = match &synth_gateway {
                        Some(gateway) => match synthesize(raw, gateway, &self.vocabulary) {
                            Ok(resp) => {
                                match parse_structured(&resp.raw_text, &self.vocabulary, &raw.artwork_id) {
                                    Ok(mut a) => {
                                        a.provenance.synth_model = gateway.config.model_id.clone();
                                        a.provenance.synthesized_at = resp.received_at.clone();
                                        a
                                    }
                                    Err(failure) => {
                                        let mut a =
                                            fallback_extract(&raw.raw_text, &self.vocabulary, &raw.artwork_id);
                                        a.warnings.push(format!("synthesis unparseable: {}", failure.reason));
                                        a
                                    }
                                }
                            }
                            Err(e) => {
                                let mut a =
                                    fallback_extract(&raw.raw_text, &self.vocabulary, &raw.artwork_id);
                                a.warnings.push(format!("synthesis call failed: {e}"));
                                a
                            }
                        },
                        None => fallback_extract(&raw.raw_text, &self.vocabulary, &raw.artwork_id),
                    };
                    analysis.provenance.vision_model = raw.model_id.clone();
                    analysis.provenance.analyzed_at = raw.received_at.clone();
                    crate::gateway::BatchResult::Ok { value: analysis }
                }
            };
            structured.push(BatchOutcome {
                artwork_id: outcome.artwork_id.clone(),
                result,
            });
        }
        write_jsonl(&self.run_dir.join("structured.jsonl"), &structured)?;
        Ok(structured)
    }

    fn load_or_synthesize(&self) -> Result<Vec<BatchOutcome<StructuredAnalysis>>, PipelineError> {
        let path = self.run_dir.join("structured.jsonl");
        if path.exists() {
            return Ok(crate::reporting::read_jsonl(&path)?);
        }
        self.synthesize()
    }

    /// Embeds per-focus prose against ground-truth style descriptions and
    /// writes scores, Table-1-style stats (per-model rows then pooled SBON
    /// rows) and the four treemap datasets.
    pub fn evaluate(&self) -> Result<CorpusScores, PipelineError> {
        let corpus = self.load_or_ingest()?;
        let structured = self.load_or_synthesize()?;
        let analyses: Vec<StructuredAnalysis> =
            structured.iter().filter_map(|o| o.ok().cloned()).collect();
        let styles = StyleDescriptionSet::from_file(&self.config.style_descriptions)?;
        let embedders: Vec<Embedder> = self
            .config
            .providers
            .embeddings
            .iter()
            .map(|c| {
                Embedder::new(c.clone(), self.embed_backend(c), &self.cache_dir, self.clock.clone())
            })
            .collect();
        let scores = embed_corpus(&analyses, &corpus, &styles, &embedders)?;

        write_scores_csv(&self.run_dir.join("scores.csv"), &scores.scores)?;
        let stats = self.stats_rows(&scores)?;
        write_stats_csv(&self.run_dir.join("stats.csv"), &stats)?;
        write_json_pretty(
            &self.run_dir.join("coverage.json"),
            &serde_json::json!({
                "coverage": scores.coverage(),
                "scored": scores.scores.len(),
                "missing": scores.missing,
            }),
        )?;

        let hierarchies: [(&str, &[TreemapKey]); 4] = [
            ("model_style_focus", &[TreemapKey::Model, TreemapKey::Style, TreemapKey::Focus]),
            ("style_model_focus", &[TreemapKey::Style, TreemapKey::Model, TreemapKey::Focus]),
            ("style_focus_model", &[TreemapKey::Style, TreemapKey::Focus, TreemapKey::Model]),
            (
                "artist_style_focus_model",
                &[TreemapKey::Artist, TreemapKey::Style, TreemapKey::Focus, TreemapKey::Model],
            ),
        ];
        for (name, hierarchy) in hierarchies {
            let tree = treemap_by_hierarchy(&scores.scores, &corpus, hierarchy);
            write_treemap_json(&self.run_dir.join("treemaps").join(format!("{name}.json")), &tree)?;
        }
        Ok(scores)
    }

    fn stats_rows(&self, scores: &CorpusScores) -> Result<Vec<SimilarityStats>, PipelineError> {
        if scores.scores.is_empty() {
            return Ok(Vec::new());
        }
        let mut rows = table1_stats(&scores.scores)?;
        rows.extend(sbon_aggregate(&scores.scores)?);
        Ok(rows)
    }

    /// Emits the analytics datasets and every chart, then the run manifest.
    pub fn report(&self, manifest: &mut RunManifest) -> Result<(), PipelineError> {
        let corpus = self.load_or_ingest()?;
        let structured = self.load_or_synthesize()?;
        let analyses: Vec<StructuredAnalysis> =
            structured.iter().filter_map(|o| o.ok().cloned()).collect();
        let bin_width = self.config.analytics.bin_width;
        let analytics_dir = self.run_dir.join("analytics");
        let charts_dir = self.run_dir.join("charts");
        std::fs::create_dir_all(&analytics_dir)?;
        std::fs::create_dir_all(&charts_dir)?;

        for facet in self.vocabulary.facet_names() {
            let series = facet_distribution(&analyses, &corpus, facet, bin_width, false)
                .map_err(|e| PipelineError::Fatal(e.to_string()))?;
            write_distribution_csv(&analytics_dir.join(format!("distribution_{facet}.csv")), &series)?;
            std::fs::write(
                charts_dir.join(format!("area_{facet}.svg")),
                stacked_area_svg(&series, &format!("{facet} label incidences over time")),
            )?;
            let cumulative = facet_distribution(&analyses, &corpus, facet, bin_width, true)
                .map_err(|e| PipelineError::Fatal(e.to_string()))?;
            write_distribution_csv(&analytics_dir.join(format!("cumulative_{facet}.csv")), &cumulative)?;

            let crosstab =
                style_facet_crosstab(&analyses, &corpus, facet, self.config.analytics.crosstab_top_k)
                    .map_err(|e| PipelineError::Fatal(e.to_string()))?;
            write_crosstab_csv(&analytics_dir.join(format!("crosstab_{facet}.csv")), &crosstab)?;
        }

        let (boxes, skipped) = tone_percentage_boxplots(&analyses, &corpus, 50)
            .map_err(|e| PipelineError::Fatal(e.to_string()))?;
        write_boxplots_csv(&analytics_dir.join("tone_boxplots.csv"), &boxes)?;
        write_json_pretty(
            &analytics_dir.join("tone_boxplots_skipped.json"),
            &serde_json::json!({ "skipped": skipped }),
        )?;
        std::fs::write(
            charts_dir.join("tone_boxplots.svg"),
            boxplot_svg(&boxes, "color tone percentage per 50-year period"),
        )?;

        // Evaluation charts, from the artifacts evaluate() wrote.
        let stats_path = self.run_dir.join("stats.csv");
        if stats_path.exists() {
            let pairs = read_sbon_medians(&stats_path)?;
            std::fs::write(
                charts_dir.join("sbon_medians.svg"),
                bar_svg(&pairs, "pooled median cosine similarity per focus area"),
            )?;
        }
        for name in [
            "model_style_focus",
            "style_model_focus",
            "style_focus_model",
            "artist_style_focus_model",
        ] {
            let path = self.run_dir.join("treemaps").join(format!("{name}.json"));
            if !path.exists() {
                continue;
            }
            let tree: crate::evaluation::TreemapNode =
                serde_json::from_str(&std::fs::read_to_string(&path)?)
                    .map_err(std::io::Error::other)?;
            std::fs::write(
                charts_dir.join(format!("treemap_{name}.svg")),
                treemap_svg(&tree, &format!("cumulative scores by {}", name.replace('_', " > "))),
            )?;
        }

        manifest.finished_at = self.timestamps.now();
        write_json_pretty(&self.run_dir.join("run_manifest.json"), manifest)?;
        Ok(())
    }

    /// All stages in order. Returns the manifest; overall status is the
    /// worst stage status (some artworks failing ⇒ partial, not fatal).
    pub fn run(&self) -> Result<RunManifest, PipelineError> {
        let mut manifest = RunManifest::new(
            &self.run_id(),
            &self.config.digest(),
            &self.timestamps.now(),
        );

        let corpus = self.ingest(None)?;
        manifest.record("ingest", StageStatus::Ok, 1.0);
        let total = corpus.records.len().max(1) as f64;

        let responses = self.analyze()?;
        let ok_responses = responses.iter().filter(|o| o.ok().is_some()).count();
        manifest.record(
            "analyze",
            if ok_responses == responses.len() { StageStatus::Ok } else { StageStatus::Partial },
            ok_responses as f64 / total,
        );

        let structured = self.synthesize()?;
        let ok_structured = structured.iter().filter(|o| o.ok().is_some()).count();
        manifest.record(
            "synthesize",
            if ok_structured == structured.len() { StageStatus::Ok } else { StageStatus::Partial },
            ok_structured as f64 / total,
        );

        let scores = self.evaluate()?;
        let coverage = scores.coverage();
        manifest.record(
            "evaluate",
            if scores.missing.is_empty() { StageStatus::Ok } else { StageStatus::Partial },
            coverage,
        );

        self.report(&mut manifest)?;
        manifest.record("report", StageStatus::Ok, 1.0);
        // report() already wrote the manifest; rewrite with its own status.
        manifest.finished_at = self.timestamps.now();
        write_json_pretty(&self.run_dir.join("run_manifest.json"), &manifest)?;
        Ok(manifest)
    }
}

fn read_sbon_medians(stats_path: &Path) -> std::io::Result<Vec<(String, f64)>> {
    let text = std::fs::read_to_string(stats_path)?;
    let mut pairs = Vec::new();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() == 7 && fields[0] == "SBON" {
            if let Ok(median) = fields[4].parse::<f64>() {
                pairs.push((fields[1].to_string(), median));
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AnalyticsConfig, OutputConfig, ProvidersConfig};
    use crate::gateway::{ProviderConfig, ProviderKind};

    fn fixture_corpus_csv() -> String {
        let mut csv = String::from("id,artist,title,year,style,image_ref\n");
        for i in 0..6 {
            let style = if i % 2 == 0 { "Cubism" } else { "Impressionism" };
            let year = if i == 5 { String::new() } else { (1880 + 10 * i).to_string() };
            csv.push_str(&format!("a{i:02},Artist {},Title {i},{year},{style},img{i}.png\n", i % 3));
        }
        csv
    }

    fn test_config(dir: &Path) -> RunConfig {
        let corpus = dir.join("corpus.csv");
        std::fs::write(&corpus, fixture_corpus_csv()).unwrap();
        let styles = dir.join("styles.json");
        std::fs::write(
            &styles,
            r#"{"Cubism": "fragmented geometric planes and muted tones",
                "Impressionism": "loose visible brushwork and natural light"}"#,
        )
        .unwrap();
        RunConfig {
            corpus,
            inquiry_file: None,
            vocabulary_file: None,
            style_descriptions: styles,
            providers: ProvidersConfig {
                vision: ProviderConfig::new(ProviderKind::VisionChat, "mock-vision"),
                synth: Some(ProviderConfig::new(ProviderKind::TextChat, "mock-synth")),
                embeddings: vec![
                    ProviderConfig::new(ProviderKind::Embedding, "embed-a"),
                    ProviderConfig::new(ProviderKind::Embedding, "embed-b"),
                ],
            },
            analytics: AnalyticsConfig::default(),
            output: OutputConfig {
                run_dir: dir.join("runs"),
                cache_dir: None,
            },
        }
    }

    fn mock_options(run_dir: PathBuf) -> PipelineOptions {
        PipelineOptions {
            run_dir: Some(run_dir),
            seed: 7,
            mock: true,
            bin_width: None,
        }
    }

    #[test]
    fn full_mock_run_emits_expected_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let config = test_config(dir.path());
        let pipeline =
            Pipeline::new(config, &mock_options(dir.path().join("runs/r1"))).unwrap();
        let manifest = pipeline.run().unwrap();
        assert_eq!(manifest.overall(), StageStatus::Ok);
        for file in [
            "corpus.jsonl",
            "corpus_summary.json",
            "responses.jsonl",
            "structured.jsonl",
            "scores.csv",
            "stats.csv",
            "coverage.json",
            "run_manifest.json",
            "treemaps/model_style_focus.json",
            "analytics/tone_boxplots.csv",
            "charts/tone_boxplots.svg",
            "charts/sbon_medians.svg",
        ] {
            let path = pipeline.run_dir.join(file);
            assert!(path.exists(), "missing {file}");
            assert!(std::fs::metadata(&path).unwrap().len() > 0, "empty {file}");
        }
        // 2 models × 6 focus rows + 6 SBON rows + header
        let stats = std::fs::read_to_string(pipeline.run_dir.join("stats.csv")).unwrap();
        assert_eq!(stats.lines().count(), 1 + 2 * 6 + 6);
    }

    #[test]
    fn rerun_into_same_dir_is_stable_and_fresh_ids_are_append_only() {
        let dir = tempfile::tempdir().unwrap();
        let config = test_config(dir.path());
        let p1 = Pipeline::new(config.clone(), &mock_options(dir.path().join("runs/r1"))).unwrap();
        p1.run().unwrap();
        let scores_before = std::fs::read(p1.run_dir.join("scores.csv")).unwrap();
        p1.run().unwrap();
        assert_eq!(scores_before, std::fs::read(p1.run_dir.join("scores.csv")).unwrap());

        let auto1 = Pipeline::new(config.clone(), &PipelineOptions { seed: 7, mock: true, ..Default::default() }).unwrap();
        let auto2 = Pipeline::new(config, &PipelineOptions { seed: 7, mock: true, ..Default::default() }).unwrap();
        assert_ne!(auto1.run_dir, auto2.run_dir);
    }

    #[test]
    fn fallback_path_without_synth_provider_still_scores() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = test_config(dir.path());
        config.providers.synth = None;
        let pipeline =
            Pipeline::new(config, &mock_options(dir.path().join("runs/r1"))).unwrap();
        let manifest = pipeline.run().unwrap();
        assert_eq!(manifest.overall(), StageStatus::Ok);
        assert!((manifest.coverage["evaluate"] - 1.0).abs() < 1e-12);
    }
}
