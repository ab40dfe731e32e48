use std::time::Instant;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::MlGraph;

use super::adam::Adam;
use super::metrics::{compute_metrics, Metrics};
use super::model::{cross_entropy, Model};
use super::{GnnError, ModelConfig, ModelParams};

/// Telemetry emitted after every epoch; epochs count from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochEvent {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub rss_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: ModelConfig,
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
    pub val_accuracy: Vec<f64>,
    pub rss_bytes: Vec<u64>,
    pub wall_time_secs: f64,
    pub epochs_run: usize,
    pub stopped_early: bool,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub report: TrainReport,
    pub params: ModelParams,
}

/// Resident set size of this process, or 0 where `/proc` is unavailable.
pub fn resident_set_bytes() -> u64 {
    std::fs::read_to_string("/proc/self/status")
        .ok()
        .and_then(|s| {
            s.lines()
                .find_map(|l| l.strip_prefix("VmRSS:"))
                .and_then(|v| v.trim().trim_end_matches("kB").trim().parse::<u64>().ok())
        })
        .map_or(0, |kb| kb * 1024)
}

fn accuracy(logits: &Array2<f64>, labels: &[usize], mask: &[bool]) -> f64 {
    let pred = argmax_rows(logits);
    let (mut hit, mut total) = (0usize, 0usize);
    for i in (0..labels.len()).filter(|&i| mask[i]) {
        total += 1;
        hit += (pred[i] == labels[i]) as usize;
    }
    if total == 0 {
        0.0
    } else {
        hit as f64 / total as f64
    }
}

fn argmax_rows(logits: &Array2<f64>) -> Vec<usize> {
    logits
        .rows()
        .into_iter()
        .map(|r| r.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b }).0)
        .collect()
}

fn check_graph(g: &MlGraph) -> Result<(), GnnError> {
    g.validate().map_err(GnnError::Graph)?;
    if g.num_classes() < 2 {
        return Err(GnnError::Graph("fewer than two classes".into()));
    }
    Ok(())
}

/// Full-batch training: forward with dropout, masked loss, backward and an
/// Adam step per epoch, then a dropout-free validation pass.
pub fn train(
    graph: &MlGraph,
    config: &ModelConfig,
    sink: &mut dyn FnMut(&EpochEvent),
) -> Result<TrainOutcome, GnnError> {
    config.validate()?;
    check_graph(graph)?;
    if !graph.masks.train.iter().any(|&b| b) {
        return Err(GnnError::EmptyMask("train"));
    }
    if !graph.masks.val.iter().any(|&b| b) {
        return Err(GnnError::EmptyMask("val"));
    }
    let started = Instant::now();
    let model = Model::for_graph(config.model_kind, graph)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = ModelParams::init(config, graph.num_features(), graph.num_classes(), &mut rng);
    let mut adam = Adam::new(&params);
    let mut report = TrainReport {
        config: config.clone(),
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        val_accuracy: Vec::new(),
        rss_bytes: Vec::new(),
        wall_time_secs: 0.0,
        epochs_run: 0,
        stopped_early: false,
    };
    let (mut best, mut stale) = (f64::INFINITY, 0usize);
    for epoch in 1..=config.epochs {
        let fwd = model.forward(&graph.features, &params, config.dropout, Some(&mut rng))?;
        let (train_loss, grads) = model.loss_and_grad(&fwd, &params, &graph.labels, &graph.masks.train)?;
        if !train_loss.is_finite() {
            return Err(GnnError::Diverged { epoch });
        }
        adam.step(&mut params, &grads, config.learning_rate);
        let eval = model.forward(&graph.features, &params, 0.0, None)?;
        let (val_loss, _) = cross_entropy(&eval.logits, &graph.labels, &graph.masks.val)?;
        if !val_loss.is_finite() {
            return Err(GnnError::Diverged { epoch });
        }
        let event = EpochEvent {
            epoch,
            train_loss,
            val_loss,
            val_acc: accuracy(&eval.logits, &graph.labels, &graph.masks.val),
            rss_bytes: resident_set_bytes(),
        };
        report.train_loss.push(event.train_loss);
        report.val_loss.push(event.val_loss);
        report.val_accuracy.push(event.val_acc);
        report.rss_bytes.push(event.rss_bytes);
        report.epochs_run = epoch;
        sink(&event);
        if let Some(patience) = config.early_stopping_patience {
            if val_loss < best {
                best = val_loss;
                stale = 0;
            } else {
                stale += 1;
                if stale >= patience {
                    report.stopped_early = epoch < config.epochs;
                    break;
                }
            }
        }
    }
    report.wall_time_secs = started.elapsed().as_secs_f64();
    Ok(TrainOutcome { report, params })
}

/// Argmax class of every node.
pub fn predict(params: &ModelParams, graph: &MlGraph) -> Result<Vec<usize>, GnnError> {
    let model = Model::for_graph(params.kind, graph)?;
    Ok(argmax_rows(&model.forward(&graph.features, params, 0.0, None)?.logits))
}

/// Classification report on the nodes selected by `mask`.
pub fn evaluate(params: &ModelParams, graph: &MlGraph, mask: &[bool]) -> Result<Metrics, GnnError> {
    if mask.len() != graph.num_nodes {
        return Err(GnnError::Shape("mask length differs from node count".into()));
    }
    if !mask.iter().any(|&b| b) {
        return Err(GnnError::EmptyMask("evaluation"));
    }
    let pred = predict(params, graph)?;
    let idx: Vec<usize> = (0..graph.num_nodes).filter(|&i| mask[i]).collect();
    let truth: Vec<usize> = idx.iter().map(|&i| graph.labels[i]).collect();
    let pred: Vec<usize> = idx.iter().map(|&i| pred[i]).collect();
    Ok(compute_metrics(&truth, &pred, graph.num_classes(), &graph.class_names))
}
