//! The graph text network.
//!
//! Encoder, per node and layer:
//! `h_i <- sigmoid(W_self h_i + W_neigh * mean_{j in N(i)} h_j)`.
//!
//! Decoder, per pair `(u, v)` with additional features `a_uv`:
//! ```text
//! h_uv  = relu(W_feat a_uv + b_feat)
//! fused = flatten(h_uv ⊗ [z_u; z_v])      fused[i * 2d + j] = h_uv[i] * [z_u; z_v][j]
//! h     = relu(W_last fused + b_last)
//! p     = sigmoid(W_out h + b_out)
//! ```
//! Gradients are derived by hand; see `backward_batch`.

mod adam;
mod checkpoint;
mod tensor;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphstore::Graph;
use crate::rng::{rng_for, stream};

pub use adam::Adam;
pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use tensor::{dot, Tensor};

/// Lower clamp applied to probabilities before taking logs.
pub const PROB_EPS: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub d: usize,
    pub d_e: usize,
    pub d_h: usize,
    pub t_layers: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    /// `usize::MAX` disables early stopping.
    pub patience: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            d: 8,
            d_e: 8,
            d_h: 16,
            t_layers: 1,
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            batch_size: 128,
            max_epochs: 100,
            patience: 10,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: &str| {
            Err(Error::Config {
                key: key.into(),
                msg: msg.into(),
            })
        };
        if self.t_layers == 0 {
            return bad("model.t_layers", "must be at least 1");
        }
        for (key, v) in [
            ("model.d", self.d),
            ("model.d_e", self.d_e),
            ("model.d_h", self.d_h),
        ] {
            if v == 0 {
                return bad(key, "must be at least 1");
            }
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("optim.lr", "must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) {
            return bad("optim.beta1", "must lie in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.beta2) {
            return bad("optim.beta2", "must lie in [0, 1)");
        }
        if !(self.eps > 0.0) {
            return bad("optim.eps", "must be positive");
        }
        if self.batch_size == 0 {
            return bad("train.batch_size", "must be at least 1");
        }
        if self.patience == 0 {
            return bad("train.patience", "must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDims {
    pub d_in: usize,
    pub d: usize,
    pub d_e: usize,
    pub d_h: usize,
    /// Length of `a_uv`.
    pub feat_dim: usize,
    pub t_layers: usize,
}

impl ModelDims {
    pub fn new(hyper: &HyperParams, d_in: usize, feat_dim: usize) -> Self {
        ModelDims {
            d_in,
            d: hyper.d,
            d_e: hyper.d_e,
            d_h: hyper.d_h,
            feat_dim,
            t_layers: hyper.t_layers,
        }
    }

    pub fn fused_len(&self) -> usize {
        self.d_e * 2 * self.d
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderLayer {
    pub w_self: Tensor,
    pub w_neigh: Tensor,
}

/// All trainable weights. Layer 0 of the encoder maps `d_in -> d`; deeper
/// layers map `d -> d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GtnnParams {
    pub encoder: Vec<EncoderLayer>,
    pub w_feat: Tensor,
    pub b_feat: Tensor,
    pub w_last: Tensor,
    pub b_last: Tensor,
    pub w_out: Tensor,
    pub b_out: Tensor,
}

fn xavier(rows: usize, cols: usize, rng: &mut impl Rng) -> Tensor {
    let s = (6.0 / (rows + cols).max(1) as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.gen_range(-s..=s)).collect();
    Tensor::from_vec(rows, cols, data)
}

impl GtnnParams {
    pub fn zeros(dims: &ModelDims) -> Self {
        let encoder = (0..dims.t_layers)
            .map(|l| {
                let input = if l == 0 { dims.d_in } else { dims.d };
                EncoderLayer {
                    w_self: Tensor::zeros(dims.d, input),
                    w_neigh: Tensor::zeros(dims.d, input),
                }
            })
            .collect();
        GtnnParams {
            encoder,
            w_feat: Tensor::zeros(dims.d_e, dims.feat_dim),
            b_feat: Tensor::zeros(dims.d_e, 1),
            w_last: Tensor::zeros(dims.d_h, dims.fused_len()),
            b_last: Tensor::zeros(dims.d_h, 1),
            w_out: Tensor::zeros(1, dims.d_h),
            b_out: Tensor::zeros(1, 1),
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init(dims: &ModelDims, seed: u64) -> Self {
        let mut rng = rng_for(seed, stream::INIT_PARAMS, 0);
        let mut p = GtnnParams::zeros(dims);
        for layer in &mut p.encoder {
            let (r, c) = layer.w_self.shape();
            layer.w_self = xavier(r, c, &mut rng);
            layer.w_neigh = xavier(r, c, &mut rng);
        }
        let (r, c) = p.w_feat.shape();
        p.w_feat = xavier(r, c, &mut rng);
        let (r, c) = p.w_last.shape();
        p.w_last = xavier(r, c, &mut rng);
        let (r, c) = p.w_out.shape();
        p.w_out = xavier(r, c, &mut rng);
        p
    }

    pub fn dims(&self) -> ModelDims {
        let first = &self.encoder[0];
        ModelDims {
            d_in: first.w_self.cols(),
            d: first.w_self.rows(),
            d_e: self.w_feat.rows(),
            d_h: self.w_last.rows(),
            feat_dim: self.w_feat.cols(),
            t_layers: self.encoder.len(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        GtnnParams::zeros(&self.dims())
    }

    /// Named parameter blocks in a fixed order.
    pub fn blocks(&self) -> Vec<(String, &Tensor)> {
        let mut out = Vec::new();
        for (l, layer) in self.encoder.iter().enumerate() {
            out.push((format!("encoder[{l}].w_self"), &layer.w_self));
            out.push((format!("encoder[{l}].w_neigh"), &layer.w_neigh));
        }
        out.push(("w_feat".into(), &self.w_feat));
        out.push(("b_feat".into(), &self.b_feat));
        out.push(("w_last".into(), &self.w_last));
        out.push(("b_last".into(), &self.b_last));
        out.push(("w_out".into(), &self.w_out));
        out.push(("b_out".into(), &self.b_out));
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = Vec::new();
        for layer in &mut self.encoder {
            out.push(&mut layer.w_self);
            out.push(&mut layer.w_neigh);
        }
        out.extend([
            &mut self.w_feat,
            &mut self.b_feat,
            &mut self.w_last,
            &mut self.b_last,
            &mut self.w_out,
            &mut self.b_out,
        ]);
        out
    }

    pub fn param_count(&self) -> usize {
        self.blocks().iter().map(|(_, t)| t.len()).sum()
    }

    pub fn check_finite(&self) -> Result<()> {
        for (name, t) in self.blocks() {
            if !t.is_finite() {
                return Err(Error::NonFiniteGradient(name));
            }
        }
        Ok(())
    }

    /// Checks that the blocks agree with each other.
    pub fn validate(&self) -> Result<()> {
        if self.encoder.is_empty() {
            return Err(Error::Dimension("encoder has no layers".into()));
        }
        let dims = self.dims();
        let expected = GtnnParams::zeros(&dims);
        for ((name, a), (_, b)) in self.blocks().into_iter().zip(expected.blocks()) {
            if a.shape() != b.shape() {
                return Err(Error::Dimension(format!(
                    "{name} has shape {:?}, expected {:?}",
                    a.shape(),
                    b.shape()
                )));
            }
        }
        Ok(())
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Encoder activations for every node and layer.
#[derive(Clone, Debug)]
pub struct EncoderTrace {
    /// `h^(0) .. h^(t)`, each `n x width`.
    pub layers: Vec<Tensor>,
    /// Neighbor means feeding layer `l + 1`, each `n x width(l)`.
    pub means: Vec<Tensor>,
}

impl EncoderTrace {
    /// Final node embeddings `z`.
    pub fn z(&self) -> &Tensor {
        self.layers.last().expect("at least the input layer")
    }
}

fn neighbor_mean(g: &Graph, h: &Tensor, i: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    let nbrs = g.neighbors(i);
    if nbrs.is_empty() {
        return;
    }
    for &j in nbrs {
        for (o, &x) in out.iter_mut().zip(h.row(j)) {
            *o += x;
        }
    }
    let inv = 1.0 / nbrs.len() as f64;
    out.iter_mut().for_each(|x| *x *= inv);
}

/// Runs the encoder over all nodes of `g`. `x` holds one row per node.
pub fn encode(g: &Graph, x: &Tensor, params: &GtnnParams) -> Result<EncoderTrace> {
    if x.rows() != g.len() {
        return Err(Error::Dimension(format!(
            "{} embedding rows for {} nodes",
            x.rows(),
            g.len()
        )));
    }
    let dims = params.dims();
    if x.cols() != dims.d_in {
        return Err(Error::Dimension(format!(
            "embeddings have width {}, model expects {}",
            x.cols(),
            dims.d_in
        )));
    }
    let n = g.len();
    let mut layers = vec![x.clone()];
    let mut means = Vec::with_capacity(params.encoder.len());
    for layer in &params.encoder {
        let h = layers.last().unwrap();
        let width = h.cols();
        let mut mean = Tensor::zeros(n, width);
        let mut next = Tensor::zeros(n, dims.d);
        let mut a = vec![0.0; dims.d];
        let mut b = vec![0.0; dims.d];
        for i in 0..n {
            neighbor_mean(g, h, i, mean.row_mut(i));
            layer.w_self.matvec_into(h.row(i), &mut a);
            layer.w_neigh.matvec_into(mean.row(i), &mut b);
            for ((o, &x), &y) in next.row_mut(i).iter_mut().zip(&a).zip(&b) {
                *o = sigmoid(x + y);
            }
        }
        means.push(mean);
        layers.push(next);
    }
    Ok(EncoderTrace { layers, means })
}

/// Decoder activations for one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardTrace {
    pub u: usize,
    pub v: usize,
    pub features: Vec<f64>,
    pub h_uv: Vec<f64>,
    /// `[z_u; z_v]`
    pub concat: Vec<f64>,
    pub fused: Vec<f64>,
    pub hidden: Vec<f64>,
    pub logit: f64,
    pub p: f64,
}

/// Row-major flattening of `a ⊗ b`.
pub fn outer_flat(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

fn relu_in_place(x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v = v.max(0.0));
}

pub fn forward_pair(
    u: usize,
    v: usize,
    z: &Tensor,
    features: &[f64],
    params: &GtnnParams,
) -> Result<ForwardTrace> {
    let dims = params.dims();
    if features.len() != dims.feat_dim {
        return Err(Error::Dimension(format!(
            "pair features have length {}, model expects {}",
            features.len(),
            dims.feat_dim
        )));
    }
    if z.cols() != dims.d || u >= z.rows() || v >= z.rows() {
        return Err(Error::Dimension(
            "node embeddings do not match the model".into(),
        ));
    }
    let mut h_uv = params.w_feat.matvec(features);
    for (h, b) in h_uv.iter_mut().zip(params.b_feat.as_slice()) {
        *h += b;
    }
    relu_in_place(&mut h_uv);
    let mut concat = Vec::with_capacity(2 * dims.d);
    concat.extend_from_slice(z.row(u));
    concat.extend_from_slice(z.row(v));
    let fused = outer_flat(&h_uv, &concat);
    let mut hidden = params.w_last.matvec(&fused);
    for (h, b) in hidden.iter_mut().zip(params.b_last.as_slice()) {
        *h += b;
    }
    relu_in_place(&mut hidden);
    let logit = dot(params.w_out.row(0), &hidden) + params.b_out.get(0, 0);
    Ok(ForwardTrace {
        u,
        v,
        features: features.to_vec(),
        h_uv,
        concat,
        fused,
        hidden,
        logit,
        p: sigmoid(logit),
    })
}

/// Binary cross-entropy on a probability clamped to `[1e-7, 1 - 1e-7]`.
pub fn bce_loss(p: f64, label: u8) -> f64 {
    let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// One pair's contribution to a weighted batch loss.
#[derive(Clone, Copy, Debug)]
pub struct BackwardItem<'a> {
    pub trace: &'a ForwardTrace,
    pub label: u8,
    /// Confidence weight, treated as a constant.
    pub weight: f64,
}

/// Gradients of `(1/B) * sum_i weight_i * bce(p_i, y_i)` w.r.t. every parameter.
///
/// The logit gradient uses `p - y`, the derivative of the unclamped loss.
/// ReLU has derivative 0 at 0.
pub fn backward_batch(
    batch: &[BackwardItem<'_>],
    enc: &EncoderTrace,
    g: &Graph,
    params: &GtnnParams,
) -> Result<GtnnParams> {
    let dims = params.dims();
    let mut grads = params.zeros_like();
    if batch.is_empty() {
        return Ok(grads);
    }
    if batch.iter().any(|b| !(b.weight >= 0.0)) {
        return Err(Error::invalid("confidence weights must be non-negative"));
    }
    let scale = 1.0 / batch.len() as f64;
    let n = g.len();
    let d = dims.d;
    let two_d = 2 * d;
    let mut dz = Tensor::zeros(n, d);
    let mut touched = vec![false; n];

    let mut d_hidden = vec![0.0; dims.d_h];
    let mut d_fused = vec![0.0; dims.fused_len()];
    let mut d_huv = vec![0.0; dims.d_e];
    for item in batch {
        let t = item.trace;
        let d_logit = scale * item.weight * (t.p - f64::from(item.label));
        if d_logit == 0.0 {
            continue;
        }
        grads.w_out.add_outer(d_logit, &[1.0], &t.hidden);
        grads.b_out.as_mut_slice()[0] += d_logit;

        for ((dh, &w), &h) in d_hidden.iter_mut().zip(params.w_out.row(0)).zip(&t.hidden) {
            *dh = if h > 0.0 { d_logit * w } else { 0.0 };
        }
        grads.w_last.add_outer(1.0, &d_hidden, &t.fused);
        for (gb, &dh) in grads.b_last.as_mut_slice().iter_mut().zip(&d_hidden) {
            *gb += dh;
        }
        d_fused.iter_mut().for_each(|x| *x = 0.0);
        params.w_last.matvec_t_acc(&d_hidden, &mut d_fused);

        // fused[i * 2d + j] = h_uv[i] * concat[j]
        let mut d_concat = vec![0.0; two_d];
        for (i, dh) in d_huv.iter_mut().enumerate() {
            let block = &d_fused[i * two_d..(i + 1) * two_d];
            *dh = if t.h_uv[i] > 0.0 {
                dot(block, &t.concat)
            } else {
                0.0
            };
            let h = t.h_uv[i];
            if h != 0.0 {
                for (dc, &df) in d_concat.iter_mut().zip(block) {
                    *dc += h * df;
                }
            }
        }
        grads.w_feat.add_outer(1.0, &d_huv, &t.features);
        for (gb, &dh) in grads.b_feat.as_mut_slice().iter_mut().zip(&d_huv) {
            *gb += dh;
        }
        for (k, node) in [t.u, t.v].into_iter().enumerate() {
            for (acc, &dc) in dz
                .row_mut(node)
                .iter_mut()
                .zip(&d_concat[k * d..(k + 1) * d])
            {
                *acc += dc;
            }
            touched[node] = true;
        }
    }

    // Encoder, from the top layer down.
    let mut d_h = dz;
    for l in (0..params.encoder.len()).rev() {
        let layer = &params.encoder[l];
        let h_in = &enc.layers[l];
        let h_out = &enc.layers[l + 1];
        let mean = &enc.means[l];
        let width = h_in.cols();
        let mut d_prev = Tensor::zeros(n, width);
        let mut next_touched = vec![false; n];
        let mut pre = vec![0.0; d];
        let mut d_mean = vec![0.0; width];
        for i in 0..n {
            if !touched[i] {
                continue;
            }
            for ((p, &dh), &h) in pre.iter_mut().zip(d_h.row(i)).zip(h_out.row(i)) {
                *p = dh * h * (1.0 - h);
            }
            grads.encoder[l].w_self.add_outer(1.0, &pre, h_in.row(i));
            grads.encoder[l].w_neigh.add_outer(1.0, &pre, mean.row(i));
            if l == 0 {
                continue;
            }
            layer.w_self.matvec_t_acc(&pre, d_prev.row_mut(i));
            next_touched[i] = true;
            let nbrs = g.neighbors(i);
            if nbrs.is_empty() {
                continue;
            }
            d_mean.iter_mut().for_each(|x| *x = 0.0);
            layer.w_neigh.matvec_t_acc(&pre, &mut d_mean);
            let inv = 1.0 / nbrs.len() as f64;
            for &j in nbrs {
                for (acc, &dm) in d_prev.row_mut(j).iter_mut().zip(&d_mean) {
                    *acc += inv * dm;
                }
                next_touched[j] = true;
            }
        }
        d_h = d_prev;
        touched = next_touched;
    }

    grads.check_finite()?;
    Ok(grads)
}
