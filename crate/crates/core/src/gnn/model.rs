use ndarray::{concatenate, s, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::MlGraph;

use super::prop::SparseOp;
use super::{GnnError, Layer, ModelKind, ModelParams};

/// Propagation structure of one graph for one architecture.
#[derive(Debug, Clone)]
pub struct Model {
    pub kind: ModelKind,
    op: SparseOp,
}

/// Activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct Forward {
    /// Aggregated input of each layer (`S X` for GCN, `[X | M X]` for SAGE).
    pub aggregated: Vec<Array2<f64>>,
    pub pre_activation: Vec<Array2<f64>>,
    /// Inverted-dropout multipliers of each hidden layer, when training.
    pub dropout: Vec<Option<Array2<f64>>>,
    pub logits: Array2<f64>,
}

impl Model {
    pub fn new(kind: ModelKind, n: usize, edges: &[(u32, u32)], weights: &[f64]) -> Result<Self, GnnError> {
        if edges.len() != weights.len() {
            return Err(GnnError::Graph("edge weights misaligned".into()));
        }
        if edges.iter().any(|&(u, v)| u as usize >= n || v as usize >= n) {
            return Err(GnnError::Graph("edge endpoint out of range".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(GnnError::Graph("edge weights must be finite and non-negative".into()));
        }
        let op = match kind {
            ModelKind::Gcn => SparseOp::gcn(n, edges, weights),
            ModelKind::Sage => SparseOp::mean_in(n, edges, weights),
        };
        Ok(Model { kind, op })
    }

    pub fn for_graph(kind: ModelKind, g: &MlGraph) -> Result<Self, GnnError> {
        Self::new(kind, g.num_nodes, &g.edges, &g.edge_weights)
    }

    pub fn operator(&self) -> &SparseOp {
        &self.op
    }

    fn aggregate(&self, x: &Array2<f64>) -> Array2<f64> {
        match self.kind {
            ModelKind::Gcn => self.op.apply(x),
            ModelKind::Sage => concatenate![Axis(1), x.view(), self.op.apply(x).view()],
        }
    }

    fn aggregate_back(&self, dp: &Array2<f64>) -> Array2<f64> {
        match self.kind {
            ModelKind::Gcn => self.op.apply_transpose(dp),
            ModelKind::Sage => {
                let d = dp.ncols() / 2;
                &dp.slice(s![.., ..d]) + &self.op.apply_transpose(&dp.slice(s![.., d..]).to_owned())
            }
        }
    }

    fn check(&self, x: &Array2<f64>, params: &ModelParams) -> Result<(), GnnError> {
        if params.kind != self.kind {
            return Err(GnnError::Shape(format!("{} parameters on a {} model", params.kind.name(), self.kind.name())));
        }
        if x.nrows() != self.op.n() {
            return Err(GnnError::Shape(format!("{} feature rows for {} nodes", x.nrows(), self.op.n())));
        }
        let mut width = x.ncols();
        for (i, l) in params.layers.iter().enumerate() {
            if l.weight.nrows() != self.kind.fan_in(width) || l.bias.len() != l.weight.ncols() {
                return Err(GnnError::Shape(format!("layer {i} expects input width {}", l.weight.nrows())));
            }
            width = l.weight.ncols();
        }
        if params.layers.is_empty() {
            return Err(GnnError::Shape("no layers".into()));
        }
        Ok(())
    }

    /// Runs every layer; hidden layers use ReLU and, when `rng` is given,
    /// inverted dropout with rate `dropout`. The output layer is linear.
    pub fn forward(
        &self,
        x: &Array2<f64>,
        params: &ModelParams,
        dropout: f64,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> Result<Forward, GnnError> {
        self.check(x, params)?;
        let last = params.layers.len() - 1;
        let mut h = x.clone();
        let mut fwd = Forward {
            aggregated: Vec::new(),
            pre_activation: Vec::new(),
            dropout: Vec::new(),
            logits: Array2::zeros((0, 0)),
        };
        for (i, layer) in params.layers.iter().enumerate() {
            let p = self.aggregate(&h);
            let z = p.dot(&layer.weight) + &layer.bias;
            if z.iter().any(|v| !v.is_finite()) {
                return Err(GnnError::NonFinite { layer: i });
            }
            fwd.aggregated.push(p);
            if i == last {
                fwd.logits = z.clone();
                fwd.pre_activation.push(z);
                fwd.dropout.push(None);
                break;
            }
            h = z.mapv(|v| v.max(0.0));
            let mask =
                match rng.as_deref_mut() {
                    Some(rng) if dropout > 0.0 => {
                        let keep = 1.0 / (1.0 - dropout);
                        let m = Array2::from_shape_simple_fn(h.dim(), || {
                            if rng.random::<f64>() < dropout {
                                0.0
                            } else {
                                keep
                            }
                        });
                        h *= &m;
                        Some(m)
                    }
                    _ => None,
                };
            fwd.pre_activation.push(z);
            fwd.dropout.push(mask);
        }
        Ok(fwd)
    }

    /// Gradients of a scalar loss given its gradient with respect to the logits.
    pub fn backward(&self, fwd: &Forward, params: &ModelParams, dlogits: &Array2<f64>) -> Vec<Layer> {
        let mut grads = Vec::with_capacity(params.layers.len());
        let mut dz = dlogits.clone();
        for i in (0..params.layers.len()).rev() {
            let layer = &params.layers[i];
            grads.push(Layer { weight: fwd.aggregated[i].t().dot(&dz), bias: dz.sum_axis(Axis(0)) });
            if i == 0 {
                break;
            }
            let dh = self.aggregate_back(&dz.dot(&layer.weight.t()));
            let z = &fwd.pre_activation[i - 1];
            let mut next = dh;
            next.zip_mut_with(z, |g, &zv| {
                if zv <= 0.0 {
                    *g = 0.0
                }
            });
            if let Some(m) = &fwd.dropout[i - 1] {
                next *= m;
            }
            dz = next;
        }
        grads.reverse();
        grads
    }

    /// Masked mean cross-entropy and its parameter gradients.
    pub fn loss_and_grad(
        &self,
        fwd: &Forward,
        params: &ModelParams,
        labels: &[usize],
        mask: &[bool],
    ) -> Result<(f64, Vec<Layer>), GnnError> {
        let (loss, dlogits) = cross_entropy(&fwd.logits, labels, mask)?;
        Ok((loss, self.backward(fwd, params, &dlogits)))
    }
}

pub fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut p = logits.clone();
    for mut row in p.rows_mut() {
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - m).exp());
        let s = row.sum();
        row /= s;
    }
    p
}

/// Mean softmax cross-entropy over masked rows and `d loss / d logits`.
pub fn cross_entropy(logits: &Array2<f64>, labels: &[usize], mask: &[bool]) -> Result<(f64, Array2<f64>), GnnError> {
    let count = mask.iter().filter(|&&m| m).count();
    if count == 0 {
        return Err(GnnError::EmptyMask("loss"));
    }
    let probs = softmax_rows(logits);
    let mut grad = Array2::zeros(logits.dim());
    let mut loss = 0.0;
    for (i, &on) in mask.iter().enumerate() {
        if !on {
            continue;
        }
        let row = logits.row(i);
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - row[labels[i]];
        let mut g = grad.row_mut(i);
        g.assign(&probs.row(i));
        g[labels[i]] -= 1.0;
        g /= count as f64;
    }
    Ok((loss / count as f64, grad))
}
