//! Loop-per-node reference forward passes written straight from the layer
//! formulas, plus a central finite-difference gradient.

use ndarray::Array2;
use rand::seq::IndexedRandom;
use rand::Rng;
use variantkg_core::gnn::{compute_metrics, train, Model, ModelConfig, ModelKind, ModelParams, TrainReport};
use variantkg_core::graph::{assign_masks, MlGraph, Split};

use super::random::rng;

pub type Mat = Vec<Vec<f64>>;

/// GCN propagation: `h'_v = sum_{u in N(v) + v} w_uv h_u / sqrt(d_u d_v)`,
/// where `d_v = 1 + sum of weights of edges into v`.
pub fn gcn_propagate(n: usize, edges: &[(u32, u32)], weights: &[f64], h: &Mat) -> Mat {
    let mut deg = vec![1.0; n];
    for (&(_, v), &w) in edges.iter().zip(weights) {
        deg[v as usize] += w;
    }
    let dim = h.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0.0; dim]; n];
    for v in 0..n {
        for k in 0..dim {
            out[v][k] += h[v][k] / deg[v];
        }
    }
    for (&(u, v), &w) in edges.iter().zip(weights) {
        let (u, v) = (u as usize, v as usize);
        let c = w / (deg[u] * deg[v]).sqrt();
        for k in 0..dim {
            out[v][k] += c * h[u][k];
        }
    }
    out
}

/// SAGE mean aggregation: weighted sum over in-neighbours divided by their count.
pub fn mean_neighbours(n: usize, edges: &[(u32, u32)], weights: &[f64], h: &Mat) -> Mat {
    let dim = h.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0.0; dim]; n];
    let mut count = vec![0usize; n];
    for (&(u, v), &w) in edges.iter().zip(weights) {
        count[v as usize] += 1;
        for k in 0..dim {
            out[v as usize][k] += w * h[u as usize][k];
        }
    }
    for v in 0..n {
        if count[v] > 0 {
            out[v].iter_mut().for_each(|x| *x /= count[v] as f64);
        }
    }
    out
}

fn affine(x: &Mat, w: &ndarray::Array2<f64>, b: &ndarray::Array1<f64>) -> Mat {
    x.iter()
        .map(|row| {
            (0..w.ncols()).map(|j| b[j] + row.iter().enumerate().map(|(i, &xi)| xi * w[[i, j]]).sum::<f64>()).collect()
        })
        .collect()
}

/// Dropout-free forward pass.
pub fn forward(kind: ModelKind, n: usize, edges: &[(u32, u32)], weights: &[f64], x: &Mat, params: &ModelParams) -> Mat {
    let mut h = x.clone();
    let last = params.layers.len() - 1;
    for (i, layer) in params.layers.iter().enumerate() {
        let agg = match kind {
            ModelKind::Gcn => gcn_propagate(n, edges, weights, &h),
            ModelKind::Sage => {
                let m = mean_neighbours(n, edges, weights, &h);
                h.iter().zip(m).map(|(a, b)| a.iter().copied().chain(b).collect()).collect()
            }
        };
        h = affine(&agg, &layer.weight, &layer.bias);
        if i != last {
            h.iter_mut().flatten().for_each(|v| *v = v.max(0.0));
        }
    }
    h
}

/// Mean of `-log softmax(z)[y]` over masked rows, via log-sum-exp.
pub fn cross_entropy(logits: &Mat, labels: &[usize], mask: &[bool]) -> f64 {
    let mut total = 0.0;
    let mut count = 0;
    for (i, z) in logits.iter().enumerate() {
        if !mask[i] {
            continue;
        }
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        total += lse - z[labels[i]];
        count += 1;
    }
    total / count as f64
}

/// Central difference `(f(x+e) - f(x-e)) / 2e` for every parameter, in
/// layer order, weight entries row-major then bias.
pub fn finite_difference(params: &ModelParams, eps: f64, mut loss: impl FnMut(&ModelParams) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut p = params.clone();
    for l in 0..params.layers.len() {
        let (rows, cols) = params.layers[l].weight.dim();
        for i in 0..rows {
            for j in 0..cols {
                let orig = p.layers[l].weight[[i, j]];
                p.layers[l].weight[[i, j]] = orig + eps;
                let up = loss(&p);
                p.layers[l].weight[[i, j]] = orig - eps;
                let down = loss(&p);
                p.layers[l].weight[[i, j]] = orig;
                out.push((up - down) / (2.0 * eps));
            }
        }
        for j in 0..params.layers[l].bias.len() {
            let orig = p.layers[l].bias[j];
            p.layers[l].bias[j] = orig + eps;
            let up = loss(&p);
            p.layers[l].bias[j] = orig - eps;
            let down = loss(&p);
            p.layers[l].bias[j] = orig;
            out.push((up - down) / (2.0 * eps));
        }
    }
    out
}

/// `|a - b| / max(|a|, |b|, floor)`. The floor keeps entries whose true
/// gradient is ~0 from turning rounding noise into huge relative errors.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

pub fn to_mat(a: &ndarray::Array2<f64>) -> Mat {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// A random graph of `n` nodes for gradient checks: random directed edges
/// with positive weights, random features, labels and training mask.
pub struct SmallCase {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
    pub weights: Vec<f64>,
    pub x: Array2<f64>,
    pub labels: Vec<usize>,
    pub mask: Vec<bool>,
    pub params: ModelParams,
}

pub fn small_case(r: &mut impl Rng, kind: ModelKind) -> SmallCase {
    let n = r.random_range(8..=16);
    let dim = r.random_range(2..=5);
    let classes = r.random_range(2..=4);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u != v && r.random_bool(0.25) {
                edges.push((u, v));
            }
        }
    }
    let weights = edges.iter().map(|_| r.random_range(0.5..2.0)).collect();
    let x = Array2::from_shape_simple_fn((n, dim), || r.random_range(-1.0..1.0));
    let labels = (0..n).map(|_| r.random_range(0..classes)).collect();
    let mut mask: Vec<bool> = (0..n).map(|_| r.random_bool(0.6)).collect();
    mask[0] = true;
    let config = ModelConfig {
        model_kind: kind,
        num_layers: r.random_range(1..=2),
        hidden_dim: r.random_range(3..=6),
        seed: r.random(),
        ..Default::default()
    };
    let mut params = ModelParams::seeded(&config, dim, classes);
    for l in &mut params.layers {
        l.bias.mapv_inplace(|_| r.random_range(-0.1..0.1));
    }
    SmallCase { n, edges, weights, x, labels, mask, params }
}

fn flatten(layers: &[variantkg_core::gnn::Layer]) -> Vec<f64> {
    layers.iter().flat_map(|l| l.weight.iter().copied().chain(l.bias.iter().copied())).collect()
}

/// Largest absolute gap between the reference forward pass and the model's.
pub fn forward_gap(c: &SmallCase) -> f64 {
    let model = Model::new(c.params.kind, c.n, &c.edges, &c.weights).unwrap();
    let fast = model.forward(&c.x, &c.params, 0.0, None).unwrap().logits;
    let slow = forward(c.params.kind, c.n, &c.edges, &c.weights, &to_mat(&c.x), &c.params);
    fast.rows()
        .into_iter()
        .zip(&slow)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// Maximum relative error between analytic gradients and central
/// differences of the reference loss.
pub fn gradient_error(c: &SmallCase) -> f64 {
    let model = Model::new(c.params.kind, c.n, &c.edges, &c.weights).unwrap();
    let fwd = model.forward(&c.x, &c.params, 0.0, None).unwrap();
    let (_, grads) = model.loss_and_grad(&fwd, &c.params, &c.labels, &c.mask).unwrap();
    let analytic = flatten(&grads);
    let x = to_mat(&c.x);
    let numeric = finite_difference(&c.params, 1e-5, |p| {
        cross_entropy(&forward(p.kind, c.n, &c.edges, &c.weights, &x, p), &c.labels, &c.mask)
    });
    assert_eq!(analytic.len(), numeric.len());
    analytic.iter().zip(&numeric).map(|(&a, &b)| relative_error(a, b, 1e-6)).fold(0.0, f64::max)
}

/// Worst gradient error over `rounds` random cases of each kind.
pub fn check_gradients(seed: u64, rounds: usize) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for i in 0..rounds {
        let kind = if i % 2 == 0 { ModelKind::Gcn } else { ModelKind::Sage };
        let c = small_case(&mut r, kind);
        assert!(forward_gap(&c) < 1e-10);
        worst = worst.max(gradient_error(&c));
    }
    worst
}

/// Two classes of `n` nodes whose features are drawn around opposite
/// centres and whose edges stay mostly inside a class.
pub fn separable_graph(n: usize, seed: u64) -> MlGraph {
    let mut r = rng(seed);
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let features = Array2::from_shape_fn((n, 4), |(i, j)| {
        let centre = if labels[i] == 0 { -1.0 } else { 1.0 };
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sign * centre + r.random_range(-0.8..0.8)
    });
    let by_class: Vec<Vec<u32>> =
        (0..2).map(|c| (0..n as u32).filter(|&i| labels[i as usize] == c).collect()).collect();
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for _ in 0..3 {
            let same = r.random_bool(0.9);
            let pool = &by_class[if same { labels[u as usize] } else { 1 - labels[u as usize] }];
            let v = *pool.choose(&mut r).unwrap();
            if v != u {
                edges.push((u, v));
                edges.push((v, u));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    MlGraph {
        num_nodes: n,
        feature_names: (0..4).map(|j| format!("f{j}")).collect(),
        features,
        labels,
        label_column: "class".into(),
        class_names: vec!["a".into(), "b".into()],
        edge_weights: vec![1.0; edges.len()],
        edges,
        masks: assign_masks(n, Split::default(), seed),
        dictionaries: Vec::new(),
        source_rows: (0..n).collect(),
    }
}

pub struct TrainingCheck {
    pub best_val_accuracy: f64,
    pub deterministic: bool,
    /// Epochs `e` in the first half where `loss[e + 20] >= loss[e]`.
    pub non_decreasing: Vec<usize>,
    pub seconds: f64,
}

/// Trains `kind` for 200 epochs on [`separable_graph`]. With dropout the
/// training loss is a noisy estimate, so the monotonicity check needs
/// `dropout = 0`.
pub fn check_training(kind: ModelKind, seed: u64, dropout: f64) -> TrainingCheck {
    let g = separable_graph(200, seed);
    let config = ModelConfig { model_kind: kind, epochs: 200, seed, dropout, ..Default::default() };
    let started = std::time::Instant::now();
    let a = train(&g, &config, &mut |_| {}).unwrap();
    let seconds = started.elapsed().as_secs_f64();
    let b = train(&g, &config, &mut |_| {}).unwrap();
    let same = |x: &TrainReport, y: &TrainReport| x.train_loss == y.train_loss && x.val_accuracy == y.val_accuracy;
    let loss = &a.report.train_loss;
    let non_decreasing = (0..loss.len() / 2).filter(|&e| e + 20 < loss.len() && loss[e + 20] >= loss[e]).collect();
    TrainingCheck {
        best_val_accuracy: a.report.val_accuracy.iter().cloned().fold(0.0, f64::max),
        deterministic: same(&a.report, &b.report) && a.params == b.params,
        non_decreasing,
        seconds,
    }
}

/// Checks trace = correct count and row sums = supports on random vectors.
pub fn check_confusion_identities(seed: u64, count: usize) {
    let mut r = rng(seed);
    for _ in 0..count {
        let k = r.random_range(2..=6);
        let len = r.random_range(1..200);
        let truth: Vec<usize> = (0..len).map(|_| r.random_range(0..k)).collect();
        let pred: Vec<usize> = (0..len).map(|_| r.random_range(0..k)).collect();
        let m = compute_metrics(&truth, &pred, k, &[]);
        let correct = truth.iter().zip(&pred).filter(|(a, b)| a == b).count() as u64;
        let trace: u64 = (0..k).map(|c| m.confusion[c][c]).sum();
        assert_eq!(trace, correct);
        assert!((m.accuracy - correct as f64 / len as f64).abs() < 1e-12);
        for c in 0..k {
            let support = truth.iter().filter(|&&t| t == c).count() as u64;
            assert_eq!(m.confusion[c].iter().sum::<u64>(), support);
            assert_eq!(m.per_class[c].support, support);
            let predicted = pred.iter().filter(|&&p| p == c).count() as u64;
            assert_eq!(m.confusion.iter().map(|row| row[c]).sum::<u64>(), predicted);
        }
        assert_eq!(m.confusion.iter().flatten().sum::<u64>(), len as u64);
    }
}
