//! Turns a feature [`ResultTable`] into an integer-encoded node-classification
//! graph: one node per labelled row, dictionary-encoded features, gene or
//! fully-connected edges, and seeded train/val/test masks.

mod edges;
mod encode;
mod io;
mod masks;

use indexmap::IndexSet;
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binio::ContainerError;
use crate::sparql::ResultTable;

pub use edges::build_edges;
pub use encode::{encode_features, EncodedFeatures, NULL_CATEGORY};
pub use io::{export_graph, graph_from_bytes, graph_to_bytes, import_graph};
pub use masks::{assign_masks, Masks};

pub const DEFAULT_FULLY_CONNECTED_CAP: usize = 5_000;
pub const DEFAULT_GENE_CLIQUE_CAP: usize = 500;
pub const DEFAULT_GENE_SOURCE: &str = "ann_split_1";

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid recipe: {0}")]
    Recipe(String),
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("fully connected graph over {nodes} nodes refused: {edges} edges exceed the cap of {cap} nodes")]
    FullyConnectedCap { nodes: usize, edges: u64, cap: usize },
    #[error("gene '{gene}' has {nodes} nodes, above the per-gene cap of {cap}")]
    GeneCliqueCap { gene: String, nodes: usize, cap: usize },
    #[error(transparent)]
    Container(#[from] ContainerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EdgePolicy {
    #[default]
    GeneName,
    FullyConnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum EdgeWeight {
    #[default]
    Constant,
    InDegree,
    UserValue(f64),
}

/// Train and validation percentages; the test share is the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: u32,
    pub val: u32,
}

impl Default for Split {
    fn default() -> Self {
        Split { train: 80, val: 10 }
    }
}

impl Split {
    pub fn test(&self) -> u32 {
        100u32.saturating_sub(self.train + self.val)
    }
}

/// Right-open intervals `[b0,b1), [b1,b2), ..., [bk,inf)` over a numeric label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassBinning {
    pub boundaries: Vec<f64>,
}

impl Default for ClassBinning {
    fn default() -> Self {
        ClassBinning { boundaries: vec![0.0, 10.0, 20.0, 30.0] }
    }
}

impl ClassBinning {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.boundaries.is_empty() {
            return Err(GraphError::Recipe("label binning needs at least one boundary".into()));
        }
        if self.boundaries.iter().any(|b| !b.is_finite()) {
            return Err(GraphError::Recipe("label binning boundaries must be finite".into()));
        }
        if self.boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GraphError::Recipe("label binning boundaries must be strictly ascending".into()));
        }
        Ok(())
    }

    pub fn num_classes(&self) -> usize {
        self.boundaries.len()
    }

    /// Class of `v`, or `None` below the first boundary.
    pub fn class_of(&self, v: f64) -> Option<usize> {
        if v.is_nan() || v < self.boundaries[0] {
            return None;
        }
        Some(self.boundaries.partition_point(|&b| b <= v) - 1)
    }

    pub fn class_names(&self) -> Vec<String> {
        let b = &self.boundaries;
        (0..b.len())
            .map(|i| match b.get(i + 1) {
                Some(hi) => format!("[{},{hi})", b[i]),
                None => format!("[{},inf)", b[i]),
            })
            .collect()
    }
}

fn default_true() -> bool {
    true
}

fn default_fc_cap() -> usize {
    DEFAULT_FULLY_CONNECTED_CAP
}

fn default_gene_cap() -> usize {
    DEFAULT_GENE_CLIQUE_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecipe {
    pub feature_columns: Vec<String>,
    pub label_column: String,
    #[serde(default)]
    pub edge_policy: EdgePolicy,
    #[serde(default)]
    pub edge_weight: EdgeWeight,
    #[serde(default = "default_true")]
    pub bidirectional: bool,
    #[serde(default)]
    pub split: Split,
    #[serde(default)]
    pub seed: u64,
    /// Explicit binning; numeric labels fall back to [`ClassBinning::default`].
    #[serde(default)]
    pub label_binning: Option<ClassBinning>,
    /// Column holding gene names directly. Without it the gene name is parsed
    /// out of the first ANN annotation in `ann_split_1`.
    #[serde(default)]
    pub gene_column: Option<String>,
    #[serde(default = "default_fc_cap")]
    pub fully_connected_cap: usize,
    #[serde(default = "default_gene_cap")]
    pub gene_clique_cap: usize,
}

impl GraphRecipe {
    pub fn new(feature_columns: Vec<String>, label_column: impl Into<String>) -> Self {
        GraphRecipe {
            feature_columns,
            label_column: label_column.into(),
            edge_policy: EdgePolicy::default(),
            edge_weight: EdgeWeight::default(),
            bidirectional: true,
            split: Split::default(),
            seed: 0,
            label_binning: None,
            gene_column: None,
            fully_connected_cap: DEFAULT_FULLY_CONNECTED_CAP,
            gene_clique_cap: DEFAULT_GENE_CLIQUE_CAP,
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |m: String| Err(GraphError::Recipe(m));
        if self.feature_columns.is_empty() {
            return bad("at least one feature column is required".into());
        }
        if self.feature_columns.contains(&self.label_column) {
            return bad(format!("label column '{}' is also a feature column", self.label_column));
        }
        let mut seen = IndexSet::new();
        if let Some(dup) = self.feature_columns.iter().find(|c| !seen.insert(c.as_str())) {
            return bad(format!("feature column '{dup}' listed twice"));
        }
        if self.split.train + self.split.val > 100 {
            return bad(format!("train + val = {} exceeds 100", self.split.train + self.split.val));
        }
        if let EdgeWeight::UserValue(w) = self.edge_weight {
            if !w.is_finite() {
                return bad("user edge weight must be finite".into());
            }
        }
        if let Some(b) = &self.label_binning {
            b.validate()?;
        }
        Ok(())
    }
}

/// Value dictionary for one categorical column, codes in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dictionary {
    values: IndexSet<String>,
}

impl Dictionary {
    pub fn encode(&mut self, value: &str) -> usize {
        match self.values.get_index_of(value) {
            Some(i) => i,
            None => self.values.insert_full(value.to_string()).0,
        }
    }

    pub fn code(&self, value: &str) -> Option<usize> {
        self.values.get_index_of(value)
    }

    pub fn decode(&self, code: usize) -> Option<&str> {
        self.values.get_index(code).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = &str> {
        self.values.iter().map(String::as_str)
    }
}

impl FromIterator<String> for Dictionary {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        Dictionary { values: iter.into_iter().collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlGraph {
    pub num_nodes: usize,
    /// Names of the matrix columns, including `__present` companions.
    pub feature_names: Vec<String>,
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub label_column: String,
    pub class_names: Vec<String>,
    pub edges: Vec<(u32, u32)>,
    pub edge_weights: Vec<f64>,
    pub masks: Masks,
    /// Categorical feature column to its value dictionary.
    pub dictionaries: Vec<(String, Dictionary)>,
    /// Table row backing each node.
    pub source_rows: Vec<usize>,
}

impl MlGraph {
    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn dictionary(&self, column: &str) -> Option<&Dictionary> {
        self.dictionaries.iter().find(|(c, _)| c == column).map(|(_, d)| d)
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.num_nodes;
        if self.features.nrows() != n || self.labels.len() != n || self.source_rows.len() != n {
            return Err("row counts disagree with num_nodes".into());
        }
        if self.features.ncols() != self.feature_names.len() {
            return Err("feature names disagree with matrix width".into());
        }
        if self.features.iter().any(|v| !v.is_finite()) {
            return Err("non-finite feature cell".into());
        }
        if self.labels.iter().any(|&l| l >= self.class_names.len()) {
            return Err("label out of class range".into());
        }
        if self.edges.len() != self.edge_weights.len() {
            return Err("edge weights misaligned".into());
        }
        if self.edges.iter().any(|&(s, d)| s as usize >= n || d as usize >= n) {
            return Err("edge endpoint out of range".into());
        }
        self.masks.check(n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub feature_columns: Vec<String>,
    pub feature_names: Vec<String>,
    pub label_column: String,
    pub num_classes: usize,
    pub class_names: Vec<String>,
    pub class_counts: Vec<usize>,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub num_features: usize,
    pub edge_policy: EdgePolicy,
    pub edge_weight: EdgeWeight,
    pub bidirectional: bool,
    pub train_nodes: usize,
    pub val_nodes: usize,
    pub test_nodes: usize,
    /// Table rows skipped because their label was unbound.
    pub dropped_rows: usize,
}

pub fn summarize(g: &MlGraph, recipe: &GraphRecipe, dropped_rows: usize) -> GraphSummary {
    let mut class_counts = vec![0; g.num_classes()];
    for &l in &g.labels {
        class_counts[l] += 1;
    }
    GraphSummary {
        feature_columns: recipe.feature_columns.clone(),
        feature_names: g.feature_names.clone(),
        label_column: g.label_column.clone(),
        num_classes: g.num_classes(),
        class_names: g.class_names.clone(),
        class_counts,
        num_nodes: g.num_nodes,
        num_edges: g.edges.len(),
        num_features: g.num_features(),
        edge_policy: recipe.edge_policy,
        edge_weight: recipe.edge_weight,
        bidirectional: recipe.bidirectional,
        train_nodes: g.masks.train_count(),
        val_nodes: g.masks.val_count(),
        test_nodes: g.masks.test_count(),
        dropped_rows,
    }
}

/// Encodes, connects and splits `table` according to `recipe`.
pub fn assemble_graph(table: &ResultTable, recipe: &GraphRecipe) -> Result<(MlGraph, GraphSummary), GraphError> {
    recipe.validate()?;
    let enc = encode_features(table, recipe)?;
    let n = enc.labels.len();
    let (edges, edge_weights) = build_edges(table, &enc.source_rows, recipe)?;
    let masks = assign_masks(n, recipe.split, recipe.seed);
    let g = MlGraph {
        num_nodes: n,
        feature_names: enc.feature_names,
        features: enc.features,
        labels: enc.labels,
        label_column: recipe.label_column.clone(),
        class_names: enc.class_names,
        edges,
        edge_weights,
        masks,
        dictionaries: enc.dictionaries,
        source_rows: enc.source_rows,
    };
    g.validate().map_err(GraphError::Recipe)?;
    let dropped = table.len() - n;
    let summary = summarize(&g, recipe, dropped);
    Ok((g, summary))
}
