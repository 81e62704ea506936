//! Names and schemas of the files exchanged between stages.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::PipelineError;

pub const SEQUENCES_CSV: &str = "sequences.csv";
pub const MODELS_CSV: &str = "models.csv";
pub const INGEST_REPORT: &str = "ingest_report.json";
pub const SEGMENTS_CSV: &str = "segments.csv";
pub const SEGMENTATION_JSON: &str = "segmentation.json";
pub const DENSITY_CSV: &str = "density.csv";
pub const DENSITY_SVG: &str = "density.svg";
pub const BEHAVIORS_CSV: &str = "behaviors.csv";
pub const BEHAVIOR_CLUSTERS_JSON: &str = "behavior_clusters.json";
pub const FEATURES_CSV: &str = "features.csv";
pub const PROJECTION_CSV: &str = "projection.csv";
pub const PROJECTION_SVG: &str = "projection.svg";
pub const LOADINGS_CSV: &str = "loadings.csv";
pub const ELBOW_CSV: &str = "elbow.csv";
pub const ELBOW_SVG: &str = "elbow.svg";
pub const LEARNER_GROUPS_JSON: &str = "learner_groups.json";
pub const QUALITY_CSV: &str = "quality.csv";
pub const COMPLEXITY_SVG: &str = "quality_complexity.svg";
pub const VARIETY_SVG: &str = "quality_variety.svg";
pub const STATS_JSON: &str = "stats.json";
pub const CONTINGENCY_CSV: &str = "contingency.csv";
pub const EVAL_CSV: &str = "eval.csv";

pub fn dendrogram_json(group: &str) -> String {
    format!("dendrogram_{group}.json")
}

pub fn dendrogram_svg(group: &str) -> String {
    format!("dendrogram_{group}.svg")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub sequence_id: usize,
    pub learner_id: String,
    pub model_id: String,
    pub is_copied: bool,
    pub length: usize,
    pub symbols: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRow {
    pub learner_id: String,
    pub model_id: String,
    pub is_copied: bool,
    pub first_ts: u64,
    pub n_c: u64,
    pub n_p: u64,
    pub n_s: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRow {
    pub sequence_id: usize,
    pub length: usize,
    /// Stratum index; empty for outliers.
    pub stratum: Option<usize>,
    /// Stratum name or `outlier`.
    pub group: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorRow {
    pub sequence_id: usize,
    pub group: String,
    pub cluster: usize,
    pub behavior_type: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub model_id: String,
    pub behavior_type: String,
    pub complexity: usize,
    pub variety: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_variety: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relationship_variety: Option<usize>,
}

pub(crate) fn io_error(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::input(path.display().to_string(), e)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| PipelineError::internal(path.display().to_string(), e))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_error(path, e))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Writes a header and already formatted records.
pub fn write_csv_records(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(header).map_err(|e| io_error(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Reads a CSV into typed rows; errors carry the file and line.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let mut out = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        let row = rec.map_err(|e| PipelineError::input(format!("{}:{}", path.display(), i + 2), e))?;
        out.push(row);
    }
    Ok(out)
}

/// Reads a CSV whose columns are not known in advance.
pub fn read_csv_records(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), PipelineError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let header = r
        .headers()
        .map_err(|e| io_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| PipelineError::input(format!("{}:{}", path.display(), i + 2), e))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}
