//! Layer kinds, their parameter layouts and forward/backward passes.
//!
//! Parameter layouts (row-major):
//! * `Conv1d`: kernel `(k, in, out)` then bias `(out)`; `same` zero padding
//!   with `(k - 1) / 2` zeros on the left and the rest on the right.
//! * `Dense`: weights `(in, out)` then bias `(out)`, applied at every time step.
//! * `Lstm`: input weights `(in, 4h)`, recurrent weights `(h, 4h)`, bias `(4h)`;
//!   gate blocks ordered input, forget, cell, output.

use serde::{Deserialize, Serialize};

use super::tensor::Tensor3;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Elu,
    Tanh,
    Sigmoid,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Elu => {
                if x > 0.0 {
                    x
                } else {
                    x.exp_m1()
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => sigmoid(x),
            Activation::Linear => x,
        }
    }

    /// Derivative with respect to the pre-activation `x`.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Elu => {
                if x > 0.0 {
                    1.0
                } else {
                    x.exp()
                }
            }
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            Activation::Linear => 1.0,
        }
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv1d {
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
    },
    MaxPool1d {
        size: usize,
    },
    Upsample1d {
        size: usize,
    },
    Dense {
        in_dim: usize,
        out_dim: usize,
    },
    Lstm {
        in_dim: usize,
        hidden: usize,
        return_sequences: bool,
    },
    Repeat {
        times: usize,
    },
    Activation {
        activation: Activation,
    },
}

/// Per-layer state saved by the forward pass.
#[derive(Debug, Clone)]
pub enum LayerCache {
    Input(Tensor3),
    Pool { argmax: Vec<usize>, in_len: usize },
    Upsample { in_len: usize },
    Repeat,
    Lstm(LstmCache),
}

#[derive(Debug, Clone)]
pub struct LstmCache {
    x: Tensor3,
    /// Post-activation gates `(batch, len, 4h)`.
    gates: Vec<f64>,
    /// Cell states `(batch, len, h)`.
    cells: Vec<f64>,
    /// Hidden states `(batch, len, h)`.
    hiddens: Vec<f64>,
}

impl LayerSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            LayerSpec::Conv1d { .. } => "conv1d",
            LayerSpec::MaxPool1d { .. } => "maxpool1d",
            LayerSpec::Upsample1d { .. } => "upsample1d",
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::Lstm { .. } => "lstm",
            LayerSpec::Repeat { .. } => "repeat",
            LayerSpec::Activation { .. } => "activation",
        }
    }

    pub fn param_count(&self) -> usize {
        match *self {
            LayerSpec::Conv1d {
                in_channels,
                out_channels,
                kernel,
            } => kernel * in_channels * out_channels + out_channels,
            LayerSpec::Dense { in_dim, out_dim } => in_dim * out_dim + out_dim,
            LayerSpec::Lstm { in_dim, hidden, .. } => 4 * (in_dim * hidden + hidden * hidden + hidden),
            LayerSpec::MaxPool1d { .. }
            | LayerSpec::Upsample1d { .. }
            | LayerSpec::Repeat { .. }
            | LayerSpec::Activation { .. } => 0,
        }
    }

    /// Output `(length, channels)` for an input `(length, channels)`, or a
    /// description of the expected input.
    pub fn output_shape(&self, (len, ch): (usize, usize)) -> Result<(usize, usize), String> {
        match *self {
            LayerSpec::Conv1d {
                in_channels,
                out_channels,
                kernel,
            } => {
                if kernel == 0 {
                    return Err("kernel size >= 1".into());
                }
                if ch != in_channels {
                    return Err(format!("(_, {in_channels}) input"));
                }
                Ok((len, out_channels))
            }
            LayerSpec::MaxPool1d { size } => {
                if size < 2 {
                    return Err("pool size >= 2".into());
                }
                if len < size {
                    return Err(format!("length >= {size}"));
                }
                Ok((len / size, ch))
            }
            LayerSpec::Upsample1d { size } => {
                if size < 2 {
                    return Err("upsample size >= 2".into());
                }
                Ok((len * size, ch))
            }
            LayerSpec::Dense { in_dim, out_dim } => {
                if ch != in_dim {
                    return Err(format!("(_, {in_dim}) input"));
                }
                Ok((len, out_dim))
            }
            LayerSpec::Lstm {
                in_dim,
                hidden,
                return_sequences,
            } => {
                if ch != in_dim {
                    return Err(format!("(_, {in_dim}) input"));
                }
                Ok((if return_sequences { len } else { 1 }, hidden))
            }
            LayerSpec::Repeat { times } => {
                if len != 1 {
                    return Err(format!("(1, {ch}) input"));
                }
                Ok((times, ch))
            }
            LayerSpec::Activation { .. } => Ok((len, ch)),
        }
    }

    /// Glorot-uniform weights, zero biases, LSTM forget-gate bias 1.
    pub fn init(&self, rng: &mut SplitMix64, params: &mut [f64]) {
        let glorot = |rng: &mut SplitMix64, out: &mut [f64], fan_in: usize, fan_out: usize| {
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for w in out {
                *w = rng.uniform(-limit, limit);
            }
        };
        match *self {
            LayerSpec::Conv1d {
                in_channels,
                out_channels,
                kernel,
            } => {
                let nw = kernel * in_channels * out_channels;
                glorot(rng, &mut params[..nw], kernel * in_channels, kernel * out_channels);
                params[nw..].fill(0.0);
            }
            LayerSpec::Dense { in_dim, out_dim } => {
                let nw = in_dim * out_dim;
                glorot(rng, &mut params[..nw], in_dim, out_dim);
                params[nw..].fill(0.0);
            }
            LayerSpec::Lstm { in_dim, hidden, .. } => {
                let g = 4 * hidden;
                let (w, rest) = params.split_at_mut(in_dim * g);
                let (u, b) = rest.split_at_mut(hidden * g);
                glorot(rng, w, in_dim, g);
                glorot(rng, u, hidden, g);
                b.fill(0.0);
                b[hidden..2 * hidden].fill(1.0);
            }
            _ => {}
        }
    }

    pub fn forward(&self, params: &[f64], x: &Tensor3) -> (Tensor3, LayerCache) {
        let (batch, len, ch) = x.shape();
        match *self {
            LayerSpec::Conv1d {
                in_channels,
                out_channels,
                kernel,
            } => {
                let (w, bias) = params.split_at(kernel * in_channels * out_channels);
                let pad_left = (kernel - 1) / 2;
                let mut y = Tensor3::zeros(batch, len, out_channels);
                for b in 0..batch {
                    let xs = x.sample(b);
                    let ys = y.sample_mut(b);
                    for t in 0..len {
                        let out = &mut ys[t * out_channels..(t + 1) * out_channels];
                        out.copy_from_slice(bias);
                        for j in 0..kernel {
                            let src = t + j;
                            if src < pad_left || src - pad_left >= len {
                                continue;
                            }
                            let xt = &xs[(src - pad_left) * in_channels..][..in_channels];
                            let wj = &w[j * in_channels * out_channels..][..in_channels * out_channels];
                            for (i, &xv) in xt.iter().enumerate() {
                                let row = &wj[i * out_channels..][..out_channels];
                                for (o, &wv) in out.iter_mut().zip(row) {
                                    *o += wv * xv;
                                }
                            }
                        }
                    }
                }
                (y, LayerCache::Input(x.clone()))
            }
            LayerSpec::MaxPool1d { size } => {
                let out_len = len / size;
                let mut y = Tensor3::zeros(batch, out_len, ch);
                let mut argmax = Vec::with_capacity(batch * out_len * ch);
                for b in 0..batch {
                    for t in 0..out_len {
                        for c in 0..ch {
                            let mut best = t * size;
                            for s in t * size + 1..(t + 1) * size {
                                if x.get(b, s, c) > x.get(b, best, c) {
                                    best = s;
                                }
                            }
                            let yi = y.index(b, t, c);
                            y.data_mut()[yi] = x.get(b, best, c);
                            argmax.push(best);
                        }
                    }
                }
                (y, LayerCache::Pool { argmax, in_len: len })
            }
            LayerSpec::Upsample1d { size } => {
                let mut y = Tensor3::zeros(batch, len * size, ch);
                for b in 0..batch {
                    for t in 0..len * size {
                        for c in 0..ch {
                            let yi = y.index(b, t, c);
                            y.data_mut()[yi] = x.get(b, t / size, c);
                        }
                    }
                }
                (y, LayerCache::Upsample { in_len: len })
            }
            LayerSpec::Dense { in_dim, out_dim } => {
                let (w, bias) = params.split_at(in_dim * out_dim);
                let mut y = Tensor3::zeros(batch, len, out_dim);
                for (xt, yt) in x
                    .data()
                    .chunks_exact(in_dim)
                    .zip(y.data_mut().chunks_exact_mut(out_dim))
                {
                    yt.copy_from_slice(bias);
                    for (i, &xv) in xt.iter().enumerate() {
                        for (o, &wv) in yt.iter_mut().zip(&w[i * out_dim..(i + 1) * out_dim]) {
                            *o += wv * xv;
                        }
                    }
                }
                (y, LayerCache::Input(x.clone()))
            }
            LayerSpec::Lstm {
                in_dim,
                hidden,
                return_sequences,
            } => lstm_forward(params, x, in_dim, hidden, return_sequences),
            LayerSpec::Repeat { times } => {
                let mut y = Tensor3::zeros(batch, times, ch);
                for b in 0..batch {
                    let src = x.sample(b).to_vec();
                    for chunk in y.sample_mut(b).chunks_exact_mut(ch) {
                        chunk.copy_from_slice(&src);
                    }
                }
                (y, LayerCache::Repeat)
            }
            LayerSpec::Activation { activation } => {
                let mut y = x.clone();
                for v in y.data_mut() {
                    *v = activation.apply(*v);
                }
                (y, LayerCache::Input(x.clone()))
            }
        }
    }

    /// Accumulates parameter gradients into `grad_params` and returns the
    /// gradient with respect to the layer input.
    pub fn backward(
        &self,
        params: &[f64],
        cache: &LayerCache,
        gy: &Tensor3,
        grad_params: &mut [f64],
    ) -> Tensor3 {
        match (self, cache) {
            (
                &LayerSpec::Conv1d {
                    in_channels,
                    out_channels,
                    kernel,
                },
                LayerCache::Input(x),
            ) => {
                let (batch, len, _) = x.shape();
                let nw = kernel * in_channels * out_channels;
                let (w, _) = params.split_at(nw);
                let (gw, gb) = grad_params.split_at_mut(nw);
                let pad_left = (kernel - 1) / 2;
                let mut gx = Tensor3::zeros(batch, len, in_channels);
                for b in 0..batch {
                    let xs = x.sample(b);
                    let gys = gy.sample(b);
                    let gxs = gx.sample_mut(b);
                    for t in 0..len {
                        let g = &gys[t * out_channels..(t + 1) * out_channels];
                        for (acc, &gv) in gb.iter_mut().zip(g) {
                            *acc += gv;
                        }
                        for j in 0..kernel {
                            let src = t + j;
                            if src < pad_left || src - pad_left >= len {
                                continue;
                            }
                            let s = src - pad_left;
                            for i in 0..in_channels {
                                let base = (j * in_channels + i) * out_channels;
                                let xv = xs[s * in_channels + i];
                                let mut acc = 0.0;
                                for o in 0..out_channels {
                                    gw[base + o] += xv * g[o];
                                    acc += w[base + o] * g[o];
                                }
                                gxs[s * in_channels + i] += acc;
                            }
                        }
                    }
                }
                gx
            }
            (&LayerSpec::MaxPool1d { .. }, LayerCache::Pool { argmax, in_len }) => {
                let (batch, out_len, ch) = gy.shape();
                let mut gx = Tensor3::zeros(batch, *in_len, ch);
                let mut k = 0;
                for b in 0..batch {
                    for t in 0..out_len {
                        for c in 0..ch {
                            let xi = gx.index(b, argmax[k], c);
                            gx.data_mut()[xi] += gy.get(b, t, c);
                            k += 1;
                        }
                    }
                }
                gx
            }
            (&LayerSpec::Upsample1d { size }, LayerCache::Upsample { in_len }) => {
                let (batch, out_len, ch) = gy.shape();
                let mut gx = Tensor3::zeros(batch, *in_len, ch);
                for b in 0..batch {
                    for t in 0..out_len {
                        for c in 0..ch {
                            let xi = gx.index(b, t / size, c);
                            gx.data_mut()[xi] += gy.get(b, t, c);
                        }
                    }
                }
                gx
            }
            (&LayerSpec::Dense { in_dim, out_dim }, LayerCache::Input(x)) => {
                let nw = in_dim * out_dim;
                let (w, _) = params.split_at(nw);
                let (gw, gb) = grad_params.split_at_mut(nw);
                let (batch, len, _) = x.shape();
                let mut gx = Tensor3::zeros(batch, len, in_dim);
                for ((xt, gt), gxt) in x
                    .data()
                    .chunks_exact(in_dim)
                    .zip(gy.data().chunks_exact(out_dim))
                    .zip(gx.data_mut().chunks_exact_mut(in_dim))
                {
                    for (acc, &g) in gb.iter_mut().zip(gt) {
                        *acc += g;
                    }
                    for i in 0..in_dim {
                        let row = &w[i * out_dim..(i + 1) * out_dim];
                        let grow = &mut gw[i * out_dim..(i + 1) * out_dim];
                        let mut acc = 0.0;
                        for o in 0..out_dim {
                            grow[o] += xt[i] * gt[o];
                            acc += row[o] * gt[o];
                        }
                        gxt[i] = acc;
                    }
                }
                gx
            }
            (
                &LayerSpec::Lstm {
                    in_dim,
                    hidden,
                    return_sequences,
                },
                LayerCache::Lstm(c),
            ) => lstm_backward(params, c, gy, grad_params, in_dim, hidden, return_sequences),
            (&LayerSpec::Repeat { .. }, LayerCache::Repeat) => {
                let (batch, _, ch) = gy.shape();
                let mut gx = Tensor3::zeros(batch, 1, ch);
                for b in 0..batch {
                    let dst = gx.sample_mut(b);
                    for chunk in gy.sample(b).chunks_exact(ch) {
                        for (d, &g) in dst.iter_mut().zip(chunk) {
                            *d += g;
                        }
                    }
                }
                gx
            }
            (&LayerSpec::Activation { activation }, LayerCache::Input(x)) => {
                let mut gx = gy.clone();
                for (g, &xv) in gx.data_mut().iter_mut().zip(x.data()) {
                    *g *= activation.derivative(xv);
                }
                gx
            }
            _ => unreachable!("cache kind always matches the layer that produced it"),
        }
    }
}

fn lstm_forward(
    params: &[f64],
    x: &Tensor3,
    in_dim: usize,
    hidden: usize,
    return_sequences: bool,
) -> (Tensor3, LayerCache) {
    let (batch, len, _) = x.shape();
    let g4 = 4 * hidden;
    let (w, rest) = params.split_at(in_dim * g4);
    let (u, bias) = rest.split_at(hidden * g4);

    let mut gates = vec![0.0; batch * len * g4];
    let mut cells = vec![0.0; batch * len * hidden];
    let mut hiddens = vec![0.0; batch * len * hidden];
    let mut z = vec![0.0; g4];
    let zero = vec![0.0; hidden];

    for b in 0..batch {
        let xs = x.sample(b);
        for t in 0..len {
            z.copy_from_slice(bias);
            let xt = &xs[t * in_dim..(t + 1) * in_dim];
            for (i, &xv) in xt.iter().enumerate() {
                for (zk, &wk) in z.iter_mut().zip(&w[i * g4..(i + 1) * g4]) {
                    *zk += wk * xv;
                }
            }
            let base = (b * len + t) * hidden;
            let (h_prev, c_prev) = if t == 0 {
                (&zero[..], &zero[..])
            } else {
                (
                    &hiddens[base - hidden..base],
                    &cells[base - hidden..base],
                )
            };
            for (j, &hv) in h_prev.iter().enumerate() {
                for (zk, &uk) in z.iter_mut().zip(&u[j * g4..(j + 1) * g4]) {
                    *zk += uk * hv;
                }
            }
            let gbase = (b * len + t) * g4;
            let mut c_new = vec![0.0; hidden];
            let mut h_new = vec![0.0; hidden];
            for k in 0..hidden {
                let ig = sigmoid(z[k]);
                let fg = sigmoid(z[hidden + k]);
                let cg = z[2 * hidden + k].tanh();
                let og = sigmoid(z[3 * hidden + k]);
                gates[gbase + k] = ig;
                gates[gbase + hidden + k] = fg;
                gates[gbase + 2 * hidden + k] = cg;
                gates[gbase + 3 * hidden + k] = og;
                let c = fg * c_prev[k] + ig * cg;
                c_new[k] = c;
                h_new[k] = og * c.tanh();
            }
            cells[base..base + hidden].copy_from_slice(&c_new);
            hiddens[base..base + hidden].copy_from_slice(&h_new);
        }
    }

    let y = if return_sequences {
        Tensor3::from_vec(batch, len, hidden, hiddens.clone()).expect("consistent shape")
    } else {
        let mut y = Tensor3::zeros(batch, 1, hidden);
        for b in 0..batch {
            let base = (b * len + len - 1) * hidden;
            y.sample_mut(b).copy_from_slice(&hiddens[base..base + hidden]);
        }
        y
    };
    (
        y,
        LayerCache::Lstm(LstmCache {
            x: x.clone(),
            gates,
            cells,
            hiddens,
        }),
    )
}

fn lstm_backward(
    params: &[f64],
    cache: &LstmCache,
    gy: &Tensor3,
    grad_params: &mut [f64],
    in_dim: usize,
    hidden: usize,
    return_sequences: bool,
) -> Tensor3 {
    let x = &cache.x;
    let (batch, len, _) = x.shape();
    let g4 = 4 * hidden;
    let (w, rest) = params.split_at(in_dim * g4);
    let (u, _) = rest.split_at(hidden * g4);
    let (gw, grest) = grad_params.split_at_mut(in_dim * g4);
    let (gu, gb) = grest.split_at_mut(hidden * g4);

    let mut gx = Tensor3::zeros(batch, len, in_dim);
    let mut dz = vec![0.0; g4];
    let zero = vec![0.0; hidden];

    for b in 0..batch {
        let mut dh_next = vec![0.0; hidden];
        let mut dc_next = vec![0.0; hidden];
        let xs = x.sample(b);
        for t in (0..len).rev() {
            let base = (b * len + t) * hidden;
            let gbase = (b * len + t) * g4;
            let c_prev = if t == 0 {
                &zero[..]
            } else {
                &cache.cells[base - hidden..base]
            };
            let h_prev = if t == 0 {
                &zero[..]
            } else {
                &cache.hiddens[base - hidden..base]
            };
            for k in 0..hidden {
                let mut dh = dh_next[k];
                if return_sequences {
                    dh += gy.get(b, t, k);
                } else if t == len - 1 {
                    dh += gy.get(b, 0, k);
                }
                let ig = cache.gates[gbase + k];
                let fg = cache.gates[gbase + hidden + k];
                let cg = cache.gates[gbase + 2 * hidden + k];
                let og = cache.gates[gbase + 3 * hidden + k];
                let tc = cache.cells[base + k].tanh();
                let d_o = dh * tc;
                let dc = dc_next[k] + dh * og * (1.0 - tc * tc);
                let d_i = dc * cg;
                let d_g = dc * ig;
                let d_f = dc * c_prev[k];
                dc_next[k] = dc * fg;
                dz[k] = d_i * ig * (1.0 - ig);
                dz[hidden + k] = d_f * fg * (1.0 - fg);
                dz[2 * hidden + k] = d_g * (1.0 - cg * cg);
                dz[3 * hidden + k] = d_o * og * (1.0 - og);
            }
            for (acc, &d) in gb.iter_mut().zip(&dz) {
                *acc += d;
            }
            let xt = &xs[t * in_dim..(t + 1) * in_dim];
            let gxt = &mut gx.sample_mut(b)[t * in_dim..(t + 1) * in_dim];
            for i in 0..in_dim {
                let row = &w[i * g4..(i + 1) * g4];
                let grow = &mut gw[i * g4..(i + 1) * g4];
                let mut acc = 0.0;
                for k in 0..g4 {
                    grow[k] += xt[i] * dz[k];
                    acc += row[k] * dz[k];
                }
                gxt[i] = acc;
            }
            for j in 0..hidden {
                let row = &u[j * g4..(j + 1) * g4];
                let grow = &mut gu[j * g4..(j + 1) * g4];
                let mut acc = 0.0;
                for k in 0..g4 {
                    grow[k] += h_prev[j] * dz[k];
                    acc += row[k] * dz[k];
                }
                dh_next[j] = acc;
            }
        }
    }
    gx
}
