#![allow(dead_code)]

use hrvae_core::nn::gradcheck::{check_layers, check_loss};
use hrvae_core::nn::{Activation, LayerSpec, Loss, NetParams, NetSpec, Tensor3};
use hrvae_core::rng::SplitMix64;

pub const FD_STEP: f64 = 1e-5;
pub const FD_TOL: f64 = 1e-4;
pub const CONFIGS_PER_KIND: usize = 50;

fn range(rng: &mut SplitMix64, lo: usize, hi: usize) -> usize {
    lo + rng.below((hi - lo + 1) as u64) as usize
}

fn random_tensor(rng: &mut SplitMix64, b: usize, l: usize, c: usize) -> Tensor3 {
    let data = (0..b * l * c).map(|_| rng.uniform(-1.0, 1.0)).collect();
    Tensor3::from_vec(b, l, c, data).unwrap()
}

/// A random single-layer network of the given kind plus its input length and channels.
fn random_layer(kind: &str, rng: &mut SplitMix64) -> (LayerSpec, usize, usize) {
    match kind {
        "conv1d" => {
            let in_channels = range(rng, 1, 4);
            let layer = LayerSpec::Conv1d {
                in_channels,
                out_channels: range(rng, 1, 4),
                kernel: range(rng, 1, 3),
            };
            (layer, range(rng, 2, 8), in_channels)
        }
        "maxpool1d" => {
            let size = range(rng, 2, 3);
            let len = size * range(rng, 1, 4) + range(rng, 0, size - 1);
            (LayerSpec::MaxPool1d { size }, len, range(rng, 1, 3))
        }
        "upsample1d" => (
            LayerSpec::Upsample1d {
                size: range(rng, 2, 5),
            },
            range(rng, 1, 4),
            range(rng, 1, 3),
        ),
        "dense" => {
            let in_dim = range(rng, 1, 5);
            let layer = LayerSpec::Dense {
                in_dim,
                out_dim: range(rng, 1, 5),
            };
            (layer, range(rng, 1, 3), in_dim)
        }
        "lstm" => {
            let in_dim = range(rng, 1, 3);
            let layer = LayerSpec::Lstm {
                in_dim,
                hidden: range(rng, 1, 5),
                return_sequences: rng.below(2) == 1,
            };
            (layer, range(rng, 1, 6), in_dim)
        }
        "repeat" => (
            LayerSpec::Repeat {
                times: range(rng, 1, 5),
            },
            1,
            range(rng, 1, 4),
        ),
        "relu" | "elu" | "tanh" | "sigmoid" | "linear" => {
            let activation = match kind {
                "relu" => Activation::Relu,
                "elu" => Activation::Elu,
                "tanh" => Activation::Tanh,
                "sigmoid" => Activation::Sigmoid,
                _ => Activation::Linear,
            };
            (
                LayerSpec::Activation { activation },
                range(rng, 1, 6),
                range(rng, 1, 3),
            )
        }
        other => panic!("unknown layer kind {other}"),
    }
}

pub const LAYER_KINDS: [&str; 11] = [
    "conv1d",
    "maxpool1d",
    "upsample1d",
    "dense",
    "lstm",
    "repeat",
    "relu",
    "elu",
    "tanh",
    "sigmoid",
    "linear",
];

/// Worst relative error over `CONFIGS_PER_KIND` random configurations of one layer kind.
pub fn worst_layer_error(kind: &str, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    for k in 0..CONFIGS_PER_KIND {
        let (layer, len, ch) = random_layer(kind, &mut rng);
        let spec = NetSpec {
            name: format!("{kind}-{k}"),
            input_len: len,
            input_channels: ch,
            layers: vec![layer],
            encoder_layers: 1,
        };
        let (out_len, out_ch) = spec.output_shape().unwrap();
        let mut params = NetParams::init(&spec, rng.next_u64());
        // Randomize biases too so they take part in the check.
        for w in params.weights.iter_mut() {
            *w += rng.uniform(-0.3, 0.3);
        }
        let batch = range(&mut rng, 1, 3);
        let x = random_tensor(&mut rng, batch, len, ch);
        let probe = random_tensor(&mut rng, batch, out_len, out_ch);
        let r = check_layers(&spec, &params, &x, &probe, spec.full_range(), FD_STEP).unwrap();
        worst = worst.max(r.max_rel_error());
    }
    worst
}

pub fn worst_loss_error(loss: Loss, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..CONFIGS_PER_KIND {
        let b = range(&mut rng, 1, 4);
        let l = range(&mut rng, 1, 30);
        let pred = random_tensor(&mut rng, b, l, 1);
        let target = random_tensor(&mut rng, b, l, 1);
        worst = worst.max(check_loss(loss, &pred, &target, FD_STEP).unwrap());
    }
    worst
}
pub mod oracle;
pub mod run;
