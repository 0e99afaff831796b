//! Convolutional (CAE) and LSTM (LAE) autoencoders over 30-beat windows,
//! fold-wise training and latent encoding.
//!
//! CAE layout, `(length, channels)` after each block:
//!
//! ```text
//! encoder  conv(1->8)  relu  conv(8->10) relu  maxpool(3)      (10, 10)
//!          conv(10->7) relu  conv(7->1)  relu  maxpool(5)      (2, 1)   latent
//! decoder  upsample(5) conv(1->7)  relu  conv(7->10) relu      (10, 10)
//!          upsample(3) conv(10->8) relu  conv(8->1)  linear    (30, 1)
//! ```
//!
//! All convolutions have kernel size 2 and `same` padding; the CAE has 712
//! trainable weights. The LAE is `lstm(1->20) -> dense(20->2) -> elu` for
//! the encoder and `dense(2->20) -> elu -> repeat(30) -> lstm(20->20, sequences)
//! -> dense(20->1)` for the decoder, 5163 weights.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{
    backward, count_params, forward, forward_layers, Activation, AdamState, LayerSpec, Loss,
    NetParams, NetSpec, Tensor3,
};
use crate::rng::{derive_seed, SplitMix64};
use crate::rri::{SplitPlan, Window, WINDOW_LEN};

/// Reference weight count for the CAE; realized counts are reported against it.
pub const CAE_REFERENCE_PARAMS: usize = 710;
pub const LAE_PARAMS: usize = 5163;

/// Rows per forward pass when evaluating without gradients.
const EVAL_CHUNK: usize = 256;

/// Fresh initializations tried before giving up on a dead bottleneck.
pub const MAX_INIT_ATTEMPTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Cae,
    Lae,
}

impl ModelKind {
    pub fn spec(self) -> NetSpec {
        match self {
            ModelKind::Cae => cae_spec(),
            ModelKind::Lae => lae_spec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Cae => "cae",
            ModelKind::Lae => "lae",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cae" => Ok(ModelKind::Cae),
            "lae" => Ok(ModelKind::Lae),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

fn conv(in_channels: usize, out_channels: usize) -> LayerSpec {
    LayerSpec::Conv1d {
        in_channels,
        out_channels,
        kernel: 2,
    }
}

fn act(activation: Activation) -> LayerSpec {
    LayerSpec::Activation { activation }
}

pub fn cae_spec() -> NetSpec {
    let relu = || act(Activation::Relu);
    NetSpec {
        name: "cae".into(),
        input_len: WINDOW_LEN,
        input_channels: 1,
        layers: vec![
            conv(1, 8),
            relu(),
            conv(8, 10),
            relu(),
            LayerSpec::MaxPool1d { size: 3 },
            conv(10, 7),
            relu(),
            conv(7, 1),
            relu(),
            LayerSpec::MaxPool1d { size: 5 },
            // decoder
            LayerSpec::Upsample1d { size: 5 },
            conv(1, 7),
            relu(),
            conv(7, 10),
            relu(),
            LayerSpec::Upsample1d { size: 3 },
            conv(10, 8),
            relu(),
            conv(8, 1),
        ],
        encoder_layers: 10,
    }
}

pub fn lae_spec() -> NetSpec {
    NetSpec {
        name: "lae".into(),
        input_len: WINDOW_LEN,
        input_channels: 1,
        layers: vec![
            LayerSpec::Lstm {
                in_dim: 1,
                hidden: 20,
                return_sequences: false,
            },
            LayerSpec::Dense {
                in_dim: 20,
                out_dim: 2,
            },
            act(Activation::Elu),
            // decoder
            LayerSpec::Dense {
                in_dim: 2,
                out_dim: 20,
            },
            act(Activation::Elu),
            LayerSpec::Repeat { times: WINDOW_LEN },
            LayerSpec::Lstm {
                in_dim: 20,
                hidden: 20,
                return_sequences: true,
            },
            LayerSpec::Dense {
                in_dim: 20,
                out_dim: 1,
            },
        ],
        encoder_layers: 3,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub loss: Loss,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 300,
            batch_size: 64,
            lr: 1e-4,
            loss: Loss::Mae,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::Config(format!("invalid training config {self:?}")));
        }
        Ok(())
    }
}

/// Outcome of training on four folds and validating on the fifth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub seed: u64,
    /// Seed the kept initialization was drawn from (differs from `seed` when
    /// earlier draws had a dead bottleneck).
    pub init_seed: u64,
    /// Validation MAE of the freshly initialized network.
    pub initial_val_mae: f64,
    pub final_train_mae: f64,
    pub final_val_mae: f64,
    /// Validation MAE after every epoch.
    pub val_curve: Vec<f64>,
    pub val_indices: Vec<usize>,
    /// Latent point of every validation window, in `val_indices` order.
    pub latents: Vec<[f64; 2]>,
    pub params: NetParams,
    pub adam: AdamState,
}

fn gather(windows: &[Window], idx: &[usize]) -> Result<Tensor3> {
    let rows: Vec<&[f64]> = idx.iter().map(|&i| windows[i].scaled.as_slice()).collect();
    Tensor3::from_sequences(&rows)
}

fn check_windows(windows: &[Window]) -> Result<()> {
    if let Some(w) = windows.iter().find(|w| w.scaled.len() != WINDOW_LEN) {
        return Err(Error::Validation(format!(
            "window of subject `{}` at {} has {} samples",
            w.source_subject,
            w.start_index,
            w.scaled.len()
        )));
    }
    Ok(())
}

/// Mean per-element MAE of the reconstruction of `idx`.
pub fn reconstruction_mae(
    spec: &NetSpec,
    params: &NetParams,
    windows: &[Window],
    idx: &[usize],
) -> Result<f64> {
    if idx.is_empty() {
        return Err(Error::InsufficientData("no windows to evaluate".into()));
    }
    let mut total = 0.0;
    for chunk in idx.chunks(EVAL_CHUNK) {
        let x = gather(windows, chunk)?;
        let (y, _) = forward(spec, params, &x)?;
        total += y
            .data()
            .iter()
            .zip(x.data())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
    }
    Ok(total / (idx.len() * WINDOW_LEN) as f64)
}

fn finite_or_abort(value: f64, what: &str, fold: usize, epoch: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(format!(
            "{what} is {value} in fold {fold} at epoch {epoch}"
        )))
    }
}

/// A ReLU right before the last pooling can leave a latent coordinate stuck at
/// zero for every input, and such a unit never receives gradient again.
fn latent_is_live(spec: &NetSpec, params: &NetParams, windows: &[Window], probe: &[usize]) -> Result<bool> {
    let z = encode_indices(spec, params, windows, probe)?;
    let varies = |d: usize| z.iter().any(|p| p[d] != z[0][d]);
    Ok(probe.len() < 2 || (varies(0) && varies(1)))
}

fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    if attempt == 0 {
        seed
    } else {
        derive_seed(seed, &format!("init/{attempt}"))
    }
}

/// Trains on every fold except `fold` and tracks validation MAE on `fold`.
///
/// Initialization and batch order are seeded by `derive_seed(cfg.seed, "fold/{fold}")`.
/// When the bottleneck is constant over the first training windows, at
/// initialization or after any epoch, training restarts from the seed
/// `derive_seed(seed, "init/{attempt}")`.
pub fn train_fold(
    spec: &NetSpec,
    windows: &[Window],
    plan: &SplitPlan,
    fold: usize,
    cfg: &TrainConfig,
) -> Result<FoldResult> {
    cfg.validate()?;
    check_windows(windows)?;
    if fold >= plan.folds.len() {
        return Err(Error::Validation(format!(
            "fold {fold} out of {} folds",
            plan.folds.len()
        )));
    }
    if plan.n_windows() != windows.len() {
        return Err(Error::Validation(format!(
            "split plan covers {} windows, got {}",
            plan.n_windows(),
            windows.len()
        )));
    }
    let val_idx = plan.folds[fold].clone();
    let train_idx = plan.train_indices(fold);
    debug_assert!(train_idx.iter().all(|i| !val_idx.contains(i)));
    if train_idx.is_empty() || val_idx.is_empty() {
        return Err(Error::InsufficientData(format!("fold {fold} is empty")));
    }

    let seed = derive_seed(cfg.seed, &format!("fold/{fold}"));
    let probe = &train_idx[..train_idx.len().min(EVAL_CHUNK)];
    let mut attempt = 0;
    let (init_seed, params, adam, initial_val_mae, val_curve) = 'attempts: loop {
        if attempt == MAX_INIT_ATTEMPTS {
            return Err(Error::DegenerateVariance(format!(
                "bottleneck of `{}` in fold {fold} died in {MAX_INIT_ATTEMPTS} initializations",
                spec.name
            )));
        }
        let init_seed = attempt_seed(seed, attempt);
        attempt += 1;
        let mut params = NetParams::init(spec, init_seed);
        if !latent_is_live(spec, &params, windows, probe)? {
            continue;
        }
        let mut adam = AdamState::new(params.param_count(), cfg.lr);
        let mut rng = SplitMix64::new(derive_seed(init_seed, "batches"));
        let initial_val_mae = reconstruction_mae(spec, &params, windows, &val_idx)?;
        let mut val_curve = Vec::with_capacity(cfg.epochs);
        let mut order = train_idx.clone();

        for epoch in 0..cfg.epochs {
            rng.shuffle(&mut order);
            for batch in order.chunks(cfg.batch_size) {
                let x = gather(windows, batch)?;
                let (y, cache) = forward(spec, &params, &x)?;
                let (loss, grad) = cfg.loss.eval(&y, &x)?;
                finite_or_abort(loss, "training loss", fold, epoch)?;
                let g = backward(spec, &params, &cache, &grad)?;
                adam.step(&mut params.weights, &g)?;
            }
            let val = reconstruction_mae(spec, &params, windows, &val_idx)?;
            val_curve.push(finite_or_abort(val, "validation MAE", fold, epoch)?);
            if !latent_is_live(spec, &params, windows, probe)? {
                log::warn!("fold {fold}: bottleneck died at epoch {epoch}, reinitializing");
                continue 'attempts;
            }
        }
        break (init_seed, params, adam, initial_val_mae, val_curve);
    };

    let final_train_mae = reconstruction_mae(spec, &params, windows, &train_idx)?;
    let final_val_mae = val_curve.last().copied().unwrap_or(initial_val_mae);
    let latents = encode_indices(spec, &params, windows, &val_idx)?;

    Ok(FoldResult {
        fold,
        seed,
        init_seed,
        initial_val_mae,
        final_train_mae,
        final_val_mae,
        val_curve,
        val_indices: val_idx,
        latents,
        params,
        adam,
    })
}

/// Trains every fold of `plan` in parallel; results are ordered by fold.
pub fn train_folds(
    spec: &NetSpec,
    windows: &[Window],
    plan: &SplitPlan,
    cfg: &TrainConfig,
) -> Result<Vec<FoldResult>> {
    (0..plan.folds.len())
        .into_par_iter()
        .map(|k| train_fold(spec, windows, plan, k, cfg))
        .collect()
}

fn flatten_latent(z: &[f64]) -> Result<[f64; 2]> {
    match z {
        [a, b] => Ok([*a, *b]),
        _ => Err(Error::Validation(format!(
            "latent has {} values, expected 2",
            z.len()
        ))),
    }
}

fn encode_indices(
    spec: &NetSpec,
    params: &NetParams,
    windows: &[Window],
    idx: &[usize],
) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::with_capacity(idx.len());
    for chunk in idx.chunks(EVAL_CHUNK) {
        let x = gather(windows, chunk)?;
        let (z, _) = forward_layers(spec, params, &x, spec.encoder_range())?;
        for b in 0..z.batch() {
            out.push(flatten_latent(z.sample(b))?);
        }
    }
    Ok(out)
}

/// 2-D latent point of every window, in input order.
pub fn encode(spec: &NetSpec, params: &NetParams, windows: &[Window]) -> Result<Vec<[f64; 2]>> {
    check_windows(windows)?;
    let idx: Vec<usize> = (0..windows.len()).collect();
    encode_indices(spec, params, windows, &idx)
}

/// Decoder output for one window and its MAE in scaled units.
pub fn reconstruct(spec: &NetSpec, params: &NetParams, window: &Window) -> Result<(Vec<f64>, f64)> {
    check_windows(std::slice::from_ref(window))?;
    let x = Tensor3::from_sequences(&[window.scaled.as_slice()])?;
    let (y, _) = forward(spec, params, &x)?;
    let mae = y
        .data()
        .iter()
        .zip(x.data())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / WINDOW_LEN as f64;
    Ok((y.into_vec(), mae))
}

/// Realized weight counts of both architectures.
pub fn param_counts() -> (usize, usize) {
    (count_params(&cae_spec()), count_params(&lae_spec()))
}
