//! Full-batch GCN and GraphSAGE node classification on dense `f64` matrices.
//!
//! Everything runs single-threaded with a fixed reduction order, so a seed
//! fully determines a training run.

mod adam;
mod checkpoint;
mod metrics;
mod model;
mod prop;
mod train;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binio::ContainerError;

pub use adam::Adam;
pub use checkpoint::{checkpoint_from_bytes, checkpoint_to_bytes, load_checkpoint, save_checkpoint, Checkpoint};
pub use metrics::{compute_metrics, AverageMetrics, ClassMetrics, Metrics};
pub use model::{cross_entropy, softmax_rows, Forward, Model};
pub use prop::SparseOp;
pub use train::{evaluate, predict, resident_set_bytes, train, EpochEvent, TrainOutcome, TrainReport};

#[derive(Debug, Error)]
pub enum GnnError {
    #[error("invalid model config: {0}")]
    Config(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("{0} mask selects no nodes")]
    EmptyMask(&'static str),
    #[error("non-finite activation in layer {layer}")]
    NonFinite { layer: usize },
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Diverged { epoch: usize },
    #[error("parameters do not fit the graph: {0}")]
    Shape(String),
    #[error(transparent)]
    Container(#[from] ContainerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ModelKind {
    #[default]
    #[serde(rename = "gcn", alias = "GCN")]
    Gcn,
    #[serde(rename = "sage", alias = "graphsage", alias = "GraphSAGE", alias = "SAGE")]
    Sage,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Gcn => "gcn",
            ModelKind::Sage => "sage",
        }
    }

    /// Width of the layer input after aggregation.
    pub fn fan_in(self, in_dim: usize) -> usize {
        match self {
            ModelKind::Gcn => in_dim,
            ModelKind::Sage => 2 * in_dim,
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "gcn" => Ok(ModelKind::Gcn),
            "sage" | "graphsage" => Ok(ModelKind::Sage),
            _ => Err(format!("unknown model '{s}' (expected gcn or sage)")),
        }
    }
}

fn d_layers() -> usize {
    1
}
fn d_hidden() -> usize {
    16
}
fn d_dropout() -> f64 {
    0.5
}
fn d_lr() -> f64 {
    0.01
}
fn d_epochs() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(default)]
    pub model_kind: ModelKind,
    /// Hidden layers between input and output.
    #[serde(default = "d_layers")]
    pub num_layers: usize,
    #[serde(default = "d_hidden")]
    pub hidden_dim: usize,
    #[serde(default = "d_dropout")]
    pub dropout: f64,
    #[serde(default = "d_lr")]
    pub learning_rate: f64,
    #[serde(default = "d_epochs")]
    pub epochs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Stop after this many epochs without a validation-loss improvement.
    #[serde(default)]
    pub early_stopping_patience: Option<usize>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            model_kind: ModelKind::Gcn,
            num_layers: d_layers(),
            hidden_dim: d_hidden(),
            dropout: d_dropout(),
            learning_rate: d_lr(),
            epochs: d_epochs(),
            seed: 0,
            early_stopping_patience: None,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), GnnError> {
        let bad = |m: &str| Err(GnnError::Config(m.to_string()));
        if self.num_layers < 1 {
            return bad("num_layers must be at least 1");
        }
        if self.hidden_dim < 1 {
            return bad("hidden_dim must be at least 1");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad("dropout must lie in [0, 1)");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if self.epochs < 1 {
            return bad("epochs must be at least 1");
        }
        if self.early_stopping_patience == Some(0) {
            return bad("early_stopping_patience must be at least 1");
        }
        Ok(())
    }
}

/// One layer: `weight` is `fan_in x out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    pub fn zeros(fan_in: usize, out: usize) -> Self {
        Layer { weight: Array2::zeros((fan_in, out)), bias: Array1::zeros(out) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub kind: ModelKind,
    pub layers: Vec<Layer>,
}

impl ModelParams {
    /// Uniform `(-1/sqrt(fan_in), 1/sqrt(fan_in))` weights and zero biases for
    /// the chain `in_dim -> hidden_dim^num_layers -> num_classes`.
    pub fn init(config: &ModelConfig, in_dim: usize, num_classes: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut dims = vec![in_dim];
        dims.extend(std::iter::repeat_n(config.hidden_dim, config.num_layers));
        dims.push(num_classes);
        let layers = dims
            .windows(2)
            .map(|d| {
                let fan_in = config.model_kind.fan_in(d[0]);
                let a = 1.0 / (fan_in.max(1) as f64).sqrt();
                Layer {
                    weight: Array2::from_shape_simple_fn((fan_in, d[1]), || rng.random_range(-a..a)),
                    bias: Array1::zeros(d[1]),
                }
            })
            .collect();
        ModelParams { kind: config.model_kind, layers }
    }

    pub fn seeded(config: &ModelConfig, in_dim: usize, num_classes: usize) -> Self {
        Self::init(config, in_dim, num_classes, &mut ChaCha8Rng::seed_from_u64(config.seed))
    }

    pub fn zeros_like(&self) -> Vec<Layer> {
        self.layers.iter().map(|l| Layer::zeros(l.weight.nrows(), l.weight.ncols())).collect()
    }

    pub fn in_dim(&self) -> usize {
        let fan_in = self.layers[0].weight.nrows();
        match self.kind {
            ModelKind::Gcn => fan_in,
            ModelKind::Sage => fan_in / 2,
        }
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.weight.ncols())
    }

    pub fn num_parameters(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weight.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }
}
