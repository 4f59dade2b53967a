//! Graph attention regressor for anticipatory cost estimates.
//!
//! Four attention message-passing layers over the scene graph, each followed
//! by per-channel standardization across nodes and a leaky ReLU, then a
//! mean+sum readout into a scalar. Forward and backward passes are written
//! out explicitly in f64; the gradients are checked against central finite
//! differences in the test suite.

use crate::anticipate::CostEstimator;
use crate::error::{EstimatorError, TrainError};
use crate::scene::{convert_to_graph, FeatureSpec, SceneGraph};
use crate::world::WorldState;
use ndarray::{Array1, Array2, Axis, Zip};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const LEAKY_SLOPE: f64 = 0.01;
const NORM_EPS: f64 = 1e-5;
const ADAGRAD_EPS: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Layer {
    pub wq: Array2<f64>,
    pub wk: Array2<f64>,
    pub wv: Array2<f64>,
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Regressor {
    pub spec: FeatureSpec,
    pub layers: Vec<Layer>,
    /// Readout weights over [mean ; sum] pooled features, shape 1 x 2d.
    pub w_out: Array2<f64>,
    pub b_out: f64,
}

#[derive(Clone, Debug)]
pub struct LayerGrads {
    pub wq: Array2<f64>,
    pub wk: Array2<f64>,
    pub wv: Array2<f64>,
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
}

#[derive(Clone, Debug)]
pub struct Grads {
    pub layers: Vec<LayerGrads>,
    pub w_out: Array2<f64>,
    pub b_out: f64,
}

struct LayerCache {
    x: Array2<f64>,
    q: Array2<f64>,
    k: Array2<f64>,
    v: Array2<f64>,
    /// Attention weights aligned with the neighbor lists.
    alpha: Vec<Vec<f64>>,
    h: Array2<f64>,
    hhat: Array2<f64>,
    inv_std: Array1<f64>,
    /// Post-norm pre-activation, needed for the leaky ReLU mask.
    y: Array2<f64>,
}

/// Sums in value order, so node relabeling cannot perturb the result and
/// predictions stay bit-identical under graph permutation.
fn stable_sum(vals: &mut Vec<f64>) -> f64 {
    vals.sort_by(|a, b| a.total_cmp(b));
    vals.iter().sum()
}

fn fan_in_uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    let bound = 1.0 / (rows as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-bound..bound))
}

/// Neighbor lists with the node itself in slot 0, deduplicated, sorted.
fn neighbor_lists(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut sets: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); n];
    for &(a, b) in edges {
        sets[b].insert(a);
    }
    sets.iter()
        .enumerate()
        .map(|(i, s)| {
            let mut nb = vec![i];
            nb.extend(s.iter().copied().filter(|&j| j != i));
            nb
        })
        .collect()
}

impl Regressor {
    pub fn new(spec: FeatureSpec, hidden_dim: usize, n_layers: usize, seed: u64) -> Regressor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(n_layers);
        let mut d_in = spec.feature_len();
        for _ in 0..n_layers {
            layers.push(Layer {
                wq: fan_in_uniform(&mut rng, d_in, hidden_dim),
                wk: fan_in_uniform(&mut rng, d_in, hidden_dim),
                wv: fan_in_uniform(&mut rng, d_in, hidden_dim),
                gamma: Array1::ones(hidden_dim),
                beta: Array1::zeros(hidden_dim),
            });
            d_in = hidden_dim;
        }
        let w_out = fan_in_uniform(&mut rng, 1, 2 * hidden_dim);
        Regressor {
            spec,
            layers,
            w_out,
            b_out: 0.0,
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.gamma.len())
    }

    pub fn zero_grads(&self) -> Grads {
        Grads {
            layers: self
                .layers
                .iter()
                .map(|l| LayerGrads {
                    wq: Array2::zeros(l.wq.raw_dim()),
                    wk: Array2::zeros(l.wk.raw_dim()),
                    wv: Array2::zeros(l.wv.raw_dim()),
                    gamma: Array1::zeros(l.gamma.raw_dim()),
                    beta: Array1::zeros(l.beta.raw_dim()),
                })
                .collect(),
            w_out: Array2::zeros(self.w_out.raw_dim()),
            b_out: 0.0,
        }
    }

    fn forward(&self, graph: &SceneGraph) -> (f64, Vec<LayerCache>, Array2<f64>) {
        let n = graph.node_count();
        let neighbors = neighbor_lists(n, &graph.edges);
        let mut x = graph.features.clone();
        let mut caches = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let d = layer.gamma.len();
            let scale = (d as f64).sqrt();
            let q = x.dot(&layer.wq);
            let k = x.dot(&layer.wk);
            let v = x.dot(&layer.wv);
            let mut h = Array2::zeros((n, d));
            let mut alpha = Vec::with_capacity(n);
            for i in 0..n {
                let nb = &neighbors[i];
                let mut scores: Vec<f64> = nb
                    .iter()
                    .map(|&j| q.row(i).dot(&k.row(j)) / scale)
                    .collect();
                let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                for s in scores.iter_mut() {
                    *s = (*s - max).exp();
                }
                let total = stable_sum(&mut scores.clone());
                for s in scores.iter_mut() {
                    *s /= total;
                }
                for c in 0..d {
                    let mut terms: Vec<f64> = nb
                        .iter()
                        .zip(scores.iter())
                        .map(|(&j, &a)| a * v[[j, c]])
                        .collect();
                    h[[i, c]] = stable_sum(&mut terms);
                }
                alpha.push(scores);
            }
            let mut mu = Array1::zeros(d);
            let mut var = Array1::zeros(d);
            for c in 0..d {
                let col = h.column(c);
                let m = stable_sum(&mut col.iter().copied().collect()) / n as f64;
                let ms = stable_sum(&mut col.iter().map(|&x| x * x).collect()) / n as f64;
                mu[c] = m;
                var[c] = ms - m * m;
            }
            let inv_std = var.mapv(|v| 1.0 / (v + NORM_EPS).sqrt());
            let hhat = (&h - &mu) * &inv_std;
            let y = &hhat * &layer.gamma + &layer.beta;
            let z = y.mapv(|v| if v >= 0.0 { v } else { LEAKY_SLOPE * v });
            caches.push(LayerCache {
                x,
                q,
                k,
                v,
                alpha,
                h,
                hhat,
                inv_std,
                y,
            });
            x = z;
        }
        let d = x.ncols();
        let mut pred = self.b_out;
        for c in 0..d {
            let sum = stable_sum(&mut x.column(c).iter().copied().collect());
            pred += self.w_out[[0, c]] * (sum / n as f64) + self.w_out[[0, d + c]] * sum;
        }
        (pred, caches, x)
    }

    /// Prediction for a featurized graph.
    pub fn predict(&self, graph: &SceneGraph) -> Result<f64, EstimatorError> {
        let want = self.spec.feature_len();
        let got = graph.features.ncols();
        if want != got {
            return Err(EstimatorError::ShapeMismatch(format!(
                "expected {want} features per node, got {got}"
            )));
        }
        Ok(self.forward(graph).0)
    }

    /// Prediction plus the gradient of the prediction wrt every parameter.
    pub fn predict_with_grads(&self, graph: &SceneGraph) -> (f64, Grads) {
        let (pred, caches, z_last) = self.forward(graph);
        let n = graph.node_count() as f64;
        let neighbors = neighbor_lists(graph.node_count(), &graph.edges);
        let mut grads = self.zero_grads();
        let d = self.hidden_dim();

        grads.b_out = 1.0;
        let mean = z_last.mean_axis(Axis(0)).unwrap();
        let sum = z_last.sum_axis(Axis(0));
        for c in 0..d {
            grads.w_out[[0, c]] = mean[c];
            grads.w_out[[0, d + c]] = sum[c];
        }
        let mut dz = Array2::zeros(z_last.raw_dim());
        for c in 0..d {
            let g = self.w_out[[0, c]] / n + self.w_out[[0, d + c]];
            dz.column_mut(c).fill(g);
        }

        for (li, layer) in self.layers.iter().enumerate().rev() {
            let cache = &caches[li];
            let rows = cache.h.nrows();
            // leaky ReLU
            let dy = Zip::from(&dz)
                .and(&cache.y)
                .map_collect(|&g, &y| if y >= 0.0 { g } else { LEAKY_SLOPE * g });
            // standardization with learned scale and shift
            let lg = &mut grads.layers[li];
            lg.gamma = (&dy * &cache.hhat).sum_axis(Axis(0));
            lg.beta = dy.sum_axis(Axis(0));
            let dhhat = &dy * &layer.gamma;
            let sum_dhhat = dhhat.sum_axis(Axis(0));
            let sum_dhhat_hhat = (&dhhat * &cache.hhat).sum_axis(Axis(0));
            let nr = rows as f64;
            let mut dh = Array2::zeros(cache.h.raw_dim());
            for i in 0..rows {
                for c in 0..dhhat.ncols() {
                    dh[[i, c]] = cache.inv_std[c] / nr
                        * (nr * dhhat[[i, c]]
                            - sum_dhhat[c]
                            - cache.hhat[[i, c]] * sum_dhhat_hhat[c]);
                }
            }
            // attention
            let scale = (layer.gamma.len() as f64).sqrt();
            let mut dq = Array2::zeros(cache.q.raw_dim());
            let mut dk = Array2::zeros(cache.k.raw_dim());
            let mut dv = Array2::zeros(cache.v.raw_dim());
            for i in 0..rows {
                let nb = &neighbors[i];
                let alpha = &cache.alpha[i];
                let dalpha: Vec<f64> = nb
                    .iter()
                    .map(|&j| dh.row(i).dot(&cache.v.row(j)))
                    .collect();
                let dot: f64 = alpha.iter().zip(dalpha.iter()).map(|(a, g)| a * g).sum();
                for (idx, &j) in nb.iter().enumerate() {
                    let a = alpha[idx];
                    let de = a * (dalpha[idx] - dot) / scale;
                    {
                        let mut row = dv.row_mut(j);
                        row += &(&dh.row(i) * a);
                    }
                    {
                        let mut row = dq.row_mut(i);
                        row += &(&cache.k.row(j) * de);
                    }
                    {
                        let mut row = dk.row_mut(j);
                        row += &(&cache.q.row(i) * de);
                    }
                }
            }
            lg.wq = cache.x.t().dot(&dq);
            lg.wk = cache.x.t().dot(&dk);
            lg.wv = cache.x.t().dot(&dv);
            dz = dq.dot(&layer.wq.t()) + dk.dot(&layer.wk.t()) + dv.dot(&layer.wv.t());
        }
        (pred, grads)
    }
}

impl Grads {
    fn add_scaled(&mut self, other: &Grads, s: f64) {
        for (a, b) in self.layers.iter_mut().zip(other.layers.iter()) {
            a.wq.scaled_add(s, &b.wq);
            a.wk.scaled_add(s, &b.wk);
            a.wv.scaled_add(s, &b.wv);
            a.gamma.scaled_add(s, &b.gamma);
            a.beta.scaled_add(s, &b.beta);
        }
        self.w_out.scaled_add(s, &other.w_out);
        self.b_out += s * other.b_out;
    }
}

fn adagrad2(p: &mut Array2<f64>, g: &Array2<f64>, acc: &mut Array2<f64>, lr: f64) {
    Zip::from(p).and(g).and(acc).for_each(|p, &g, a| {
        *a += g * g;
        *p -= lr * g / (a.sqrt() + ADAGRAD_EPS);
    });
}

fn adagrad1(p: &mut Array1<f64>, g: &Array1<f64>, acc: &mut Array1<f64>, lr: f64) {
    Zip::from(p).and(g).and(acc).for_each(|p, &g, a| {
        *a += g * g;
        *p -= lr * g / (a.sqrt() + ADAGRAD_EPS);
    });
}

#[derive(Clone, Debug)]
pub struct TrainingExample {
    pub graph: SceneGraph,
    pub label: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden_dim: usize,
    pub n_layers: usize,
    pub learning_rate: f64,
    /// Learning rate is multiplied by `lr_decay` every `lr_decay_every` steps.
    pub lr_decay_every: usize,
    pub lr_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            hidden_dim: 64,
            n_layers: 4,
            learning_rate: 0.01,
            lr_decay_every: 1000,
            lr_decay: 0.5,
            batch_size: 8,
            epochs: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean absolute error per epoch, in plan cost units.
    pub epoch_losses: Vec<f64>,
    pub steps: usize,
    pub final_lr: f64,
}

/// Fits a regressor to labelled graphs with Adagrad on the mean absolute
/// error. Deterministic for a fixed config.
pub fn train(
    data: &[TrainingExample],
    spec: &FeatureSpec,
    cfg: &TrainConfig,
) -> Result<(Regressor, TrainReport), TrainError> {
    if data.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut model = Regressor::new(spec.clone(), cfg.hidden_dim, cfg.n_layers, cfg.seed);
    let mut accum = model.zero_grads();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut lr = cfg.learning_rate;
    let mut step = 0usize;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for _epoch in 0..cfg.epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);
        let mut epoch_abs = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let mut grads = model.zero_grads();
            let mut batch_loss = 0.0;
            for &idx in batch {
                let ex = &data[idx];
                let (pred, g) = model.predict_with_grads(&ex.graph);
                let err = pred - ex.label;
                batch_loss += err.abs();
                grads.add_scaled(&g, err.signum() / batch.len() as f64);
            }
            batch_loss /= batch.len() as f64;
            epoch_abs += batch_loss * batch.len() as f64;
            if !batch_loss.is_finite() {
                return Err(TrainError::NonFiniteLoss { step, lr });
            }
            for ((l, g), a) in model
                .layers
                .iter_mut()
                .zip(grads.layers.iter())
                .zip(accum.layers.iter_mut())
            {
                adagrad2(&mut l.wq, &g.wq, &mut a.wq, lr);
                adagrad2(&mut l.wk, &g.wk, &mut a.wk, lr);
                adagrad2(&mut l.wv, &g.wv, &mut a.wv, lr);
                adagrad1(&mut l.gamma, &g.gamma, &mut a.gamma, lr);
                adagrad1(&mut l.beta, &g.beta, &mut a.beta, lr);
            }
            adagrad2(&mut model.w_out, &grads.w_out, &mut accum.w_out, lr);
            accum.b_out += grads.b_out * grads.b_out;
            model.b_out -= lr * grads.b_out / (accum.b_out.sqrt() + ADAGRAD_EPS);
            step += 1;
            if cfg.lr_decay_every > 0 && step % cfg.lr_decay_every == 0 {
                lr *= cfg.lr_decay;
            }
        }
        epoch_losses.push(epoch_abs / data.len() as f64);
    }
    let report = TrainReport {
        epoch_losses,
        steps: step,
        final_lr: lr,
    };
    Ok((model, report))
}

/// Cost estimator backed by a trained regressor.
pub struct LearnedEstimator {
    pub model: Regressor,
}

impl LearnedEstimator {
    pub fn new(model: Regressor) -> LearnedEstimator {
        LearnedEstimator { model }
    }
}

impl CostEstimator for LearnedEstimator {
    fn estimate(&self, state: &WorldState) -> Result<f64, EstimatorError> {
        let graph = convert_to_graph(state, &self.model.spec)?;
        self.model.predict(&graph)
    }
}
