//! Run-directory artifact emission: datasets (CSV/JSON), charts (SVG), and
//! the run manifest that records stage status and coverage.

pub mod datasets;
pub mod svg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use datasets::{
    read_jsonl, write_boxplots_csv, write_crosstab_csv, write_distribution_csv, write_json_pretty,
    write_jsonl, write_scores_csv, write_stats_csv, write_treemap_json,
};
pub use svg::{bar_svg, boxplot_svg, stacked_area_svg, treemap_svg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    Partial,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub config_digest: String,
    pub started_at: String,
    pub finished_at: String,
    pub stage_status: BTreeMap<String, StageStatus>,
    /// Fraction of expected items produced per stage, in [0, 1].
    pub coverage: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(run_id: &str, config_digest: &str, started_at: &str) -> RunManifest {
        RunManifest {
            run_id: run_id.to_string(),
            config_digest: config_digest.to_string(),
            started_at: started_at.to_string(),
            finished_at: String::new(),
            stage_status: BTreeMap::new(),
            coverage: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, stage: &str, status: StageStatus, coverage: f64) {
        assert!((0.0..=1.0).contains(&coverage), "coverage out of range");
        self.stage_status.insert(stage.to_string(), status);
        self.coverage.insert(stage.to_string(), coverage);
    }

    pub fn overall(&self) -> StageStatus {
        let mut overall = StageStatus::Ok;
        for status in self.stage_status.values() {
            match status {
                StageStatus::Failed => return StageStatus::Failed,
                StageStatus::Partial => overall = StageStatus::Partial,
                StageStatus::Ok => {}
            }
        }
        overall
    }
}
