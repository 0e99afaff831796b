use std::ops::Range;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::layer::{LayerCache, LayerSpec};
use super::tensor::Tensor3;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// A sequential network whose first `encoder_layers` layers form the encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSpec {
    pub name: String,
    pub input_len: usize,
    pub input_channels: usize,
    pub layers: Vec<LayerSpec>,
    pub encoder_layers: usize,
}

impl NetSpec {
    /// `(length, channels)` before every layer plus the final output shape.
    pub fn shapes(&self) -> Result<Vec<(usize, usize)>> {
        let mut shapes = Vec::with_capacity(self.layers.len() + 1);
        let mut cur = (self.input_len, self.input_channels);
        shapes.push(cur);
        for (i, layer) in self.layers.iter().enumerate() {
            cur = layer.output_shape(cur).map_err(|expected| Error::Shape {
                layer: i,
                kind: layer.kind_name(),
                expected,
                got: format!("{cur:?}"),
            })?;
            shapes.push(cur);
        }
        Ok(shapes)
    }

    pub fn output_shape(&self) -> Result<(usize, usize)> {
        Ok(*self.shapes()?.last().expect("at least the input shape"))
    }

    pub fn latent_shape(&self) -> Result<(usize, usize)> {
        Ok(self.shapes()?[self.encoder_layers])
    }

    pub fn encoder_range(&self) -> Range<usize> {
        0..self.encoder_layers
    }

    pub fn decoder_range(&self) -> Range<usize> {
        self.encoder_layers..self.layers.len()
    }

    pub fn full_range(&self) -> Range<usize> {
        0..self.layers.len()
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn count_params(spec: &NetSpec) -> usize {
    spec.layers.iter().map(LayerSpec::param_count).sum()
}

/// Flat trainable-weight store with per-layer offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetParams {
    pub weights: Vec<f64>,
    offsets: Vec<usize>,
}

impl NetParams {
    pub fn zeros(spec: &NetSpec) -> Self {
        let mut offsets = Vec::with_capacity(spec.layers.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for l in &spec.layers {
            acc += l.param_count();
            offsets.push(acc);
        }
        Self {
            weights: vec![0.0; acc],
            offsets,
        }
    }

    /// Seeded initialization, layers drawn in order.
    pub fn init(spec: &NetSpec, seed: u64) -> Self {
        let mut p = Self::zeros(spec);
        let mut rng = SplitMix64::new(seed);
        for (i, layer) in spec.layers.iter().enumerate() {
            let r = p.range(i);
            layer.init(&mut rng, &mut p.weights[r]);
        }
        p
    }

    pub fn from_weights(spec: &NetSpec, weights: Vec<f64>) -> Result<Self> {
        let mut p = Self::zeros(spec);
        if weights.len() != p.weights.len() {
            return Err(Error::Validation(format!(
                "{} weights for a network with {} parameters",
                weights.len(),
                p.weights.len()
            )));
        }
        p.weights = weights;
        Ok(p)
    }

    pub fn param_count(&self) -> usize {
        self.weights.len()
    }

    pub fn range(&self, layer: usize) -> Range<usize> {
        self.offsets[layer]..self.offsets[layer + 1]
    }

    pub fn layer(&self, layer: usize) -> &[f64] {
        &self.weights[self.range(layer)]
    }

    fn checksum(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for w in &self.weights {
            h ^= w.to_bits();
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }

    fn matches(&self, spec: &NetSpec) -> bool {
        self.offsets.len() == spec.layers.len() + 1 && self.weights.len() == count_params(spec)
    }
}

/// Activations saved by [`forward`] for the matching [`backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    checksum: u64,
    layers: Range<usize>,
    caches: Vec<LayerCache>,
}

/// Runs the whole network.
pub fn forward(spec: &NetSpec, params: &NetParams, batch: &Tensor3) -> Result<(Tensor3, ForwardCache)> {
    forward_layers(spec, params, batch, spec.full_range())
}

/// Runs layers `range` only, e.g. the encoder or the decoder.
pub fn forward_layers(
    spec: &NetSpec,
    params: &NetParams,
    batch: &Tensor3,
    range: Range<usize>,
) -> Result<(Tensor3, ForwardCache)> {
    if !params.matches(spec) {
        return Err(Error::Validation(format!(
            "parameter store of size {} does not fit `{}`",
            params.param_count(),
            spec.name
        )));
    }
    let shapes = spec.shapes()?;
    let expected = shapes[range.start];
    let got = (batch.len(), batch.channels());
    if got != expected {
        let layer = range.start.min(spec.layers.len().saturating_sub(1));
        return Err(Error::Shape {
            layer,
            kind: spec.layers.get(layer).map_or("input", LayerSpec::kind_name),
            expected: format!("{expected:?}"),
            got: format!("{got:?}"),
        });
    }

    let mut caches = Vec::with_capacity(range.len());
    let mut cur = batch.clone();
    for i in range.clone() {
        let (y, cache) = spec.layers[i].forward(params.layer(i), &cur);
        caches.push(cache);
        cur = y;
    }
    Ok((
        cur,
        ForwardCache {
            checksum: params.checksum(),
            layers: range,
            caches,
        },
    ))
}

/// Gradient of the loss with respect to every parameter (zero outside the
/// cached layer range).
pub fn backward(
    spec: &NetSpec,
    params: &NetParams,
    cache: &ForwardCache,
    loss_grad: &Tensor3,
) -> Result<Vec<f64>> {
    backward_with_input(spec, params, cache, loss_grad).map(|(g, _)| g)
}

/// Like [`backward`], also returning the gradient with respect to the input.
pub fn backward_with_input(
    spec: &NetSpec,
    params: &NetParams,
    cache: &ForwardCache,
    loss_grad: &Tensor3,
) -> Result<(Vec<f64>, Tensor3)> {
    if cache.checksum != params.checksum() || !params.matches(spec) {
        return Err(Error::StaleCache);
    }
    let shapes = spec.shapes()?;
    let out = shapes[cache.layers.end];
    if (loss_grad.len(), loss_grad.channels()) != out {
        return Err(Error::Shape {
            layer: cache.layers.end.saturating_sub(1),
            kind: "loss gradient",
            expected: format!("{out:?}"),
            got: format!("{:?}", (loss_grad.len(), loss_grad.channels())),
        });
    }
    let mut grads = vec![0.0; params.param_count()];
    let mut g = loss_grad.clone();
    for (k, i) in cache.layers.clone().enumerate().rev() {
        let r = params.range(i);
        g = spec.layers[i].backward(params.layer(i), &cache.caches[k], &g, &mut grads[r]);
    }
    Ok((grads, g))
}
