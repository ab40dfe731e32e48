//! Request and response bodies shared by the HTTP service and its clients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use variantkg_core::convert::VcfConvertOptions;
use variantkg_core::gnn::{EpochEvent, ModelConfig, TrainReport};
use variantkg_core::graph::{GraphRecipe, GraphSummary};
use variantkg_core::ingest::MetadataOptions;
use variantkg_core::sparql::TablePreview;
use variantkg_core::store::StoreStats;

use crate::jobs::JobState;

/// Conversion settings for one upload.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnrichOptions {
    /// Regex whose first match in a file name is the accession.
    #[serde(default)]
    pub accession_pattern: Option<String>,
    /// Explicit file name to accession bindings; these win over the pattern.
    #[serde(default)]
    pub accession_map: BTreeMap<String, String>,
    #[serde(default)]
    pub metadata: MetadataOptions,
    #[serde(default)]
    pub vcf: VcfConvertOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessionLoad {
    pub accession: String,
    pub files: Vec<String>,
    pub quads_converted: usize,
    pub quads_added: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichSummary {
    pub accessions: Vec<AccessionLoad>,
    pub quads_converted: usize,
    pub quads_added: usize,
    pub store: StoreStats,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AgeRange {
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FetchRequest {
    #[serde(default)]
    pub accession_ids: Option<Vec<String>>,
    #[serde(default)]
    pub age_range: Option<AgeRange>,
    /// Feature columns to keep next to the key columns; all when absent.
    #[serde(default)]
    pub feature_names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableInfo {
    pub table_id: String,
    pub accessions: Vec<String>,
    pub columns: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableView {
    pub info: TableInfo,
    pub preview: TablePreview,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRequest {
    pub table_id: String,
    pub recipe: GraphRecipe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub graph_id: String,
    pub table_id: String,
    pub recipe: GraphRecipe,
    pub summary: GraphSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRequest {
    pub graph_id: String,
    #[serde(default)]
    pub config: ModelConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub graph_id: String,
    pub checkpoint_id: String,
    pub report: TrainReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryPage {
    pub job_id: String,
    pub state: JobState,
    pub events: Vec<EpochEvent>,
    /// Offset to pass on the next poll.
    pub next_offset: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AccessionQuery {
    #[serde(default)]
    pub min_age: Option<f64>,
    #[serde(default)]
    pub max_age: Option<f64>,
}
